/* C interface of the ssilkc library.
 *
 * Every function returns an ssilkc_status. On failure, ssilkc_last_error()
 * returns a message for the calling thread that stays valid until the next
 * call on that thread. Handles are opaque; each *_create / *_load is paired
 * with a *_destroy, which accepts NULL. Poses are {x, y, z} in mm followed by
 * {yaw, pitch, roll} in degrees; chamber and spring vectors hold 9 values in mm.
 */
#ifndef SSILKC_H
#define SSILKC_H

#include <stddef.h>
#include <stdint.h>

#if defined(SSILKC_BUILDING_LIBRARY)
#define SSILKC_API __attribute__((visibility("default")))
#else
#define SSILKC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssilkc_status {
  SSILKC_OK = 0,
  SSILKC_ERR_INVALID_ARGUMENT = 1, /* malformed input, bad config, NULL handle */
  SSILKC_ERR_DOMAIN = 2,           /* value outside the model's valid range */
  SSILKC_ERR_IO = 3,               /* file missing, unreadable or malformed */
  SSILKC_ERR_RUNTIME = 4,          /* operation failed, e.g. collision or port in use */
  SSILKC_ERR_BUFFER_TOO_SMALL = 5, /* *needed holds the required size */
  SSILKC_ERR_INTERNAL = 99
} ssilkc_status;

SSILKC_API const char* ssilkc_last_error(void);
SSILKC_API const char* ssilkc_version(void);
SSILKC_API const char* ssilkc_status_name(ssilkc_status status);

/* Kinematics and sensing, calibrated arm. */
SSILKC_API ssilkc_status ssilkc_forward_kinematics(const double chambers[9], double pose[6]);
SSILKC_API ssilkc_status ssilkc_sensor_length_to_frequency(double spring_mm, double* frequency_hz);
SSILKC_API ssilkc_status ssilkc_sensor_frequency_to_length(double frequency_hz, double* spring_mm);

/* Simulated arm. reality != 0 applies the default model-reality gap. */
typedef struct ssilkc_env ssilkc_env;
SSILKC_API ssilkc_status ssilkc_env_create(int reality, uint64_t noise_seed, ssilkc_env** out);
SSILKC_API void ssilkc_env_destroy(ssilkc_env* env);
SSILKC_API ssilkc_status ssilkc_env_reset(ssilkc_env* env, const double chambers[9]);
SSILKC_API ssilkc_status ssilkc_env_set_load(ssilkc_env* env, double grams);
SSILKC_API ssilkc_status ssilkc_env_springs(const ssilkc_env* env, double springs[9]);
SSILKC_API ssilkc_status ssilkc_env_pressures(const ssilkc_env* env, double pressures_kpa[9]);
/* truth == 0: pose of the nominal model from the sensed springs; otherwise
 * the pose of the simulated physical arm. */
SSILKC_API ssilkc_status ssilkc_env_pose(ssilkc_env* env, int truth, double pose[6]);
/* Runs the default PID loop toward target springs. */
SSILKC_API ssilkc_status ssilkc_env_track(ssilkc_env* env, const double springs[9], int* settled, int* ticks);

/* Policy and S2R checkpoints. */
typedef struct ssilkc_policy ssilkc_policy;
SSILKC_API ssilkc_status ssilkc_policy_load(const char* path, ssilkc_policy** out);
SSILKC_API void ssilkc_policy_destroy(ssilkc_policy* policy);
/* Deterministic action (9 sensor frequencies, Hz) for a pose and goal. */
SSILKC_API ssilkc_status ssilkc_policy_act(const ssilkc_policy* policy, const double pose[6], const double goal[6],
                                           double frequencies_hz[9]);

typedef struct ssilkc_s2r ssilkc_s2r;
SSILKC_API ssilkc_status ssilkc_s2r_load(const char* path, ssilkc_s2r** out);
SSILKC_API void ssilkc_s2r_destroy(ssilkc_s2r* model);
SSILKC_API ssilkc_status ssilkc_s2r_apply(const ssilkc_s2r* model, const double pose[6], const double springs[9],
                                          double corrected[6]);

/* Runs the policy toward goal on env (s2r may be NULL). */
SSILKC_API ssilkc_status ssilkc_deploy(const ssilkc_policy* policy, const ssilkc_s2r* s2r, ssilkc_env* env,
                                       const double goal[6], int max_steps, int* success, double* error_mm);

/* Experiment configuration as JSON text (comments allowed). overrides_json
 * may be NULL; it is merged over the config before validation. Output
 * strings use the size protocol: with cap too small (or buf NULL),
 * SSILKC_ERR_BUFFER_TOO_SMALL is returned and *needed is set, including the
 * terminating NUL. */
SSILKC_API ssilkc_status ssilkc_config_resolve(const char* config_json, const char* overrides_json, char* buf,
                                               size_t cap, size_t* needed);
/* command: workspace, train-circle, train-s2r, record-demo, pickplace,
 * eval-path, gp-ablation. Writes <out>/config.json and <out>/metrics.json and returns the
 * metrics JSON. The experiment runs even when the buffer is too small; the
 * metrics file then holds the result. */
SSILKC_API ssilkc_status ssilkc_run_experiment(const char* command, const char* config_json,
                                               const char* overrides_json, char* metrics, size_t cap,
                                               size_t* needed);

/* Teleoperation service built from the "serve" section of a config. */
typedef struct ssilkc_server ssilkc_server;
SSILKC_API ssilkc_status ssilkc_server_create(const char* config_json, const char* overrides_json,
                                              ssilkc_server** out);
SSILKC_API void ssilkc_server_destroy(ssilkc_server* server);
/* Serves in a background thread; *port receives the bound port. */
SSILKC_API ssilkc_status ssilkc_server_start(ssilkc_server* server, int* port);
/* Serves on the calling thread until ssilkc_server_stop. */
SSILKC_API ssilkc_status ssilkc_server_run(ssilkc_server* server);
SSILKC_API ssilkc_status ssilkc_server_stop(ssilkc_server* server);

#ifdef __cplusplus
}
#endif

#endif
