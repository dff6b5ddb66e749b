#ifndef CYCLOCK_H
#define CYCLOCK_H

/* C interface to the cyclock library. Every call returns a cyclock_error; on failure
   cyclock_last_error() holds a message for the calling thread. Strings handed out through
   char** parameters are owned by the caller and released with cyclock_free_string. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(CYCLOCK_BUILDING)
#define CYCLOCK_API __attribute__((visibility("default")))
#else
#define CYCLOCK_API
#endif

typedef enum cyclock_error {
	CYCLOCK_OK = 0,
	CYCLOCK_E_PARSE = 1,
	CYCLOCK_E_IO = 2,
	CYCLOCK_E_CONFIG = 3,
	CYCLOCK_E_NIS = 4, /* obfuscation not possible on this circuit */
	CYCLOCK_E_ARG = 5,
	CYCLOCK_E_INTERNAL = 6
} cyclock_error;

typedef enum cyclock_attack_status {
	CYCLOCK_KEY_FOUND = 0,
	CYCLOCK_UNSAT = 1,
	CYCLOCK_PREPROCESS_TIMEOUT = 2,
	CYCLOCK_TRAP_DETECTED = 3,
	CYCLOCK_DEADLINE = 4
} cyclock_attack_status;

typedef struct cyclock_netlist cyclock_netlist;
typedef struct cyclock_oracle cyclock_oracle;

CYCLOCK_API const char* cyclock_version(void);
CYCLOCK_API const char* cyclock_last_error(void);
CYCLOCK_API void cyclock_free_string(char* s);

/* netlists */
CYCLOCK_API cyclock_error cyclock_netlist_parse(const char* bench_text, cyclock_netlist** out);
CYCLOCK_API cyclock_error cyclock_netlist_load(const char* path, cyclock_netlist** out);
CYCLOCK_API void cyclock_netlist_free(cyclock_netlist* n);
CYCLOCK_API cyclock_error cyclock_netlist_save(const cyclock_netlist* n, const char* path);
CYCLOCK_API cyclock_error cyclock_netlist_serialize(const cyclock_netlist* n, char** bench_text);
/* {"inputs","keys","outputs","gates","nets","acyclic"} */
CYCLOCK_API cyclock_error cyclock_netlist_stats(const cyclock_netlist* n, char** json);
CYCLOCK_API cyclock_error cyclock_netlist_dump_graph(const cyclock_netlist* n, char** json);
/* params: {"inputs","gates","outputs","seed"} */
CYCLOCK_API cyclock_error cyclock_gen_toy(const char* params_json, cyclock_netlist** out);

/* defenses; config: {"method","n","mc_length","sr","extra_edges","seed","slack_budget","steps"} */
CYCLOCK_API cyclock_error cyclock_obfuscate(const cyclock_netlist* n, const char* config_json, cyclock_netlist** locked,
                                            char** report_json);

/* cycle enumeration; options: {"max_count","timeout","nc":"structural|sensitizable","traversal"} */
CYCLOCK_API cyclock_error cyclock_cycles(const cyclock_netlist* n, const char* options_json, char** result_json);

/* one input vector (hex, bit i weight 2^i) under an optional key (JSON object or bit string) */
CYCLOCK_API cyclock_error cyclock_simulate(const cyclock_netlist* n, const char* input_hex, const char* key_json,
                                           char** result_json);

CYCLOCK_API cyclock_error cyclock_oracle_new(const cyclock_netlist* original, cyclock_oracle** out);
CYCLOCK_API void cyclock_oracle_free(cyclock_oracle* o);
CYCLOCK_API cyclock_error cyclock_oracle_query(cyclock_oracle* o, const char* input_hex, char** output_hex);

/* Attack `locked` against either an original netlist or an external oracle command (one must be set). */
CYCLOCK_API cyclock_error cyclock_attack(const cyclock_netlist* locked, const cyclock_netlist* original,
                                         const char* oracle_cmd, const char* config_json, char** result_json,
                                         cyclock_attack_status* status);

CYCLOCK_API cyclock_error cyclock_verify(const cyclock_netlist* original, const cyclock_netlist* locked,
                                         const char* key_json, uint64_t seed, int* equivalent, char** verdict_json);

/* delay_json and key_json may be NULL */
CYCLOCK_API cyclock_error cyclock_sta(const cyclock_netlist* n, const char* delay_json, const char* key_json,
                                      char** report_json);

CYCLOCK_API cyclock_error cyclock_lfn_bound(unsigned m, char** decimal);

/* DIMACS in, competition-style "s .../v ..." text out */
CYCLOCK_API cyclock_error cyclock_solve_dimacs(const char* dimacs, double timeout, char** result);

CYCLOCK_API cyclock_error cyclock_table(const char* spec_json, char** out);

#ifdef __cplusplus
}
#endif

#endif
