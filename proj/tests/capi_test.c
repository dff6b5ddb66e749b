#include <cyclock/cyclock.h>

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(c)                                                                                                      \
	do {                                                                                                               \
		if (!(c)) {                                                                                                    \
			fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #c, cyclock_last_error());                        \
			++failures;                                                                                                \
		}                                                                                                              \
	} while (0)

static const char* C17 = "INPUT(1)\nINPUT(2)\nINPUT(3)\nINPUT(6)\nINPUT(7)\nOUTPUT(22)\nOUTPUT(23)\n"
                         "10 = NAND(1, 3)\n11 = NAND(3, 6)\n16 = NAND(2, 11)\n19 = NAND(11, 7)\n"
                         "22 = NAND(10, 16)\n23 = NAND(16, 19)\n";

int main(void) {
	cyclock_netlist *n = NULL, *toy = NULL, *locked = NULL;
	char* s = NULL;

	EXPECT(strlen(cyclock_version()) > 0);

	EXPECT(cyclock_netlist_parse("INPUT(a)\nb = AND(a)\n", &n) == CYCLOCK_E_PARSE);
	EXPECT(n == NULL);
	EXPECT(strlen(cyclock_last_error()) > 0);
	EXPECT(cyclock_netlist_load("/nonexistent/x.bench", &n) == CYCLOCK_E_IO);
	EXPECT(cyclock_netlist_parse(NULL, &n) == CYCLOCK_E_ARG);

	EXPECT(cyclock_netlist_parse(C17, &n) == CYCLOCK_OK);
	EXPECT(cyclock_netlist_stats(n, &s) == CYCLOCK_OK);
	EXPECT(s && strstr(s, "\"gates\":6"));
	cyclock_free_string(s);

	EXPECT(cyclock_simulate(n, "1f", NULL, &s) == CYCLOCK_OK);
	EXPECT(s != NULL);
	cyclock_free_string(s);

	cyclock_oracle* o = NULL;
	EXPECT(cyclock_oracle_new(n, &o) == CYCLOCK_OK);
	EXPECT(cyclock_oracle_query(o, "00", &s) == CYCLOCK_OK);
	EXPECT(s && strlen(s) > 0);
	cyclock_free_string(s);
	cyclock_oracle_free(o);

	/* too small for two micro cycles */
	EXPECT(cyclock_obfuscate(n, "{\"method\":\"sc\",\"n\":2}", &locked, &s) == CYCLOCK_E_NIS);
	EXPECT(cyclock_obfuscate(n, "{\"method\":\"nope\"}", &locked, &s) == CYCLOCK_E_CONFIG);
	EXPECT(cyclock_obfuscate(n, "{not json", &locked, &s) == CYCLOCK_E_CONFIG);

	EXPECT(cyclock_gen_toy("{\"inputs\":12,\"gates\":160,\"seed\":3}", &toy) == CYCLOCK_OK);
	char* report = NULL;
	EXPECT(cyclock_obfuscate(toy, "{\"method\":\"sc\",\"n\":2,\"seed\":3}", &locked, &report) == CYCLOCK_OK);
	EXPECT(report && strstr(report, "\"key\""));

	EXPECT(cyclock_cycles(locked, "{\"max_count\":100}", &s) == CYCLOCK_OK);
	EXPECT(s && strstr(s, "\"count\""));
	cyclock_free_string(s);

	cyclock_attack_status st = CYCLOCK_DEADLINE;
	EXPECT(cyclock_attack(locked, toy, NULL, "{\"mode\":\"cycsat\",\"timeout\":60}", &s, &st) == CYCLOCK_OK);
	EXPECT(st == CYCLOCK_KEY_FOUND);
	cyclock_free_string(s);
	EXPECT(cyclock_attack(locked, NULL, NULL, "{\"mode\":\"sat\"}", &s, &st) == CYCLOCK_E_ARG);

	int eq = 0;
	EXPECT(cyclock_verify(toy, locked, report, 1, &eq, &s) == CYCLOCK_OK);
	EXPECT(eq == 1);
	cyclock_free_string(s);
	cyclock_free_string(report);

	EXPECT(cyclock_sta(toy, NULL, NULL, &s) == CYCLOCK_OK);
	EXPECT(s && strstr(s, "critical"));
	cyclock_free_string(s);

	EXPECT(cyclock_lfn_bound(4, &s) == CYCLOCK_OK);
	EXPECT(s && strcmp(s, "24") == 0);
	cyclock_free_string(s);

	EXPECT(cyclock_solve_dimacs("p cnf 1 1\n1 0\n", 5, &s) == CYCLOCK_OK);
	EXPECT(s && strstr(s, "s SATISFIABLE"));
	cyclock_free_string(s);
	EXPECT(cyclock_solve_dimacs("p cnf 1 2\n1 0\n-1 0\n", 5, &s) == CYCLOCK_OK);
	EXPECT(s && strstr(s, "UNSATISFIABLE"));
	cyclock_free_string(s);

	EXPECT(cyclock_netlist_serialize(locked, &s) == CYCLOCK_OK);
	cyclock_netlist* again = NULL;
	EXPECT(cyclock_netlist_parse(s, &again) == CYCLOCK_OK);
	cyclock_free_string(s);
	cyclock_netlist_free(again);

	cyclock_netlist_free(locked);
	cyclock_netlist_free(toy);
	cyclock_netlist_free(n);
	cyclock_netlist_free(NULL);

	if (failures) fprintf(stderr, "%d failures\n", failures);
	return failures ? 1 : 0;
}
