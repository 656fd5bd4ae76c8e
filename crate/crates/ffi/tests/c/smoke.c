#include <stdio.h>
#include <string.h>

#include "moc.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond);   \
            return 1;                                            \
        }                                                        \
    } while (0)

static const char *APPEND1 =
    "alphabet: 01 blank:_\n"
    "tapes: 1 0 1\n"
    "states: copy done\n"
    "start: copy\n"
    "accept: done\n"
    "copy 0 _ -> copy * 0 R R\n"
    "copy 1 _ -> copy * 1 R R\n"
    "copy _ _ -> done * 1 S R\n";

static const char *ADD =
    "inputs X1 X2\n"
    "outputs Y1\n"
    "c: if X1 = 0 goto m\n"
    "X1 = X1 - 1\n"
    "Y1 = Y1 + 1\n"
    "if W1 = 0 goto c\n"
    "m: if X2 = 0 goto e\n"
    "X2 = X2 - 1\n"
    "Y1 = Y1 + 1\n"
    "if W1 = 0 goto m\n"
    "e:\n";

int main(void) {
    MocMachine *m = NULL, *mm = NULL;
    CHECK(moc_machine_parse(APPEND1, &m) == MOC_STATUS_OK);
    CHECK(moc_machine_compose(m, m, &mm) == MOC_STATUS_OK);

    const char *in[] = {"01"};
    MocOutcome oc;
    char *out = NULL;
    uint64_t steps = 0;
    CHECK(moc_machine_run(mm, in, 1, 100000, &oc, &out, &steps) == MOC_STATUS_OK);
    CHECK(oc == MOC_OUTCOME_HALTED);
    CHECK(strcmp(out, "0111") == 0);
    CHECK(steps > 0);
    moc_string_free(out);

    bool acc = false;
    CHECK(moc_machine_accepts_sat(m, in, 1, 3, &acc) == MOC_STATUS_OK);
    CHECK(acc);

    const char *bad[] = {"0x"};
    CHECK(moc_machine_run(m, bad, 1, 10, &oc, &out, NULL) == MOC_STATUS_ALPHABET);
    CHECK(strncmp(moc_last_error(), "alphabet", 8) == 0);
    MocMachine *junk = NULL;
    CHECK(moc_machine_parse("nonsense", &junk) != MOC_STATUS_OK && junk == NULL);
    CHECK(moc_machine_parse(NULL, &junk) == MOC_STATUS_NULL_ARGUMENT);

    MocProgram *p = NULL;
    CHECK(moc_program_parse(ADD, &p) == MOC_STATUS_OK);
    uint64_t args[] = {20, 22}, vals[1];
    size_t len = 0;
    CHECK(moc_program_run(p, args, 2, 100000, &oc, vals, 1, &len) == MOC_STATUS_OK);
    CHECK(oc == MOC_OUTCOME_HALTED && len == 1 && vals[0] == 42);
    moc_program_free(p);

    moc_machine_free(m);
    moc_machine_free(mm);
    printf("ok %s\n", moc_version());
    return 0;
}
