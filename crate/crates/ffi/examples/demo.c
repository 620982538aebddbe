#include <stdio.h>
#include <stdint.h>
#include "stcode.h"

int main(void) {
    const char *text = "QUBITS 1\nM Z0\nTICK\nM Z0\n";
    StcCircuit *c = NULL;
    if (stc_circuit_parse(text, &c) != STC_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", stc_last_error_message());
        return 1;
    }
    StcSpacetimeCode *code = NULL;
    if (stc_spacetime_code_build(c, &code) != STC_STATUS_OK) {
        fprintf(stderr, "build: %s\n", stc_last_error_message());
        return 1;
    }
    uint8_t s[1];
    if (stc_spacetime_code_syndrome(code, "1.5:X0", s, 1) != STC_STATUS_OK) {
        return 1;
    }
    printf("N=%zu K=%zu r=%zu syndrome=%u\n", stc_spacetime_code_num_qubits(code),
           stc_spacetime_code_num_logicals(code), stc_spacetime_code_r(code), s[0]);

    StcCircuit *bad = NULL;
    StcStatus st = stc_circuit_parse("QUBITS 1\nFROB 0\n", &bad);
    printf("status=%d (%s)\n", (int)st, stc_status_string(st));

    stc_spacetime_code_free(code);
    stc_circuit_free(c);
    return 0;
}
