#ifndef LIVEDATA_LIVEDATA_H
#define LIVEDATA_LIVEDATA_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define LD_API __attribute__((visibility("default")))
#else
#define LD_API
#endif

/* A LiveData node bound to one repository directory. */
typedef struct ld_node ld_node;

typedef enum ld_status {
    LD_OK = 0,
    LD_ERR_VALIDATION = 1,
    LD_ERR_PARSE = 2,
    LD_ERR_INVALID_ARGUMENT = 3,
    LD_ERR_NOT_FOUND = 4,
    LD_ERR_CONFLICT = 5,
    LD_ERR_POLICY = 6,
    LD_ERR_UNKNOWN_PEER = 7,
    LD_ERR_INTEGRITY = 8,
    LD_ERR_TRANSIENT = 9,
    LD_ERR_IO = 10,
    LD_ERR_INTERNAL = 11
} ld_status;

/* Message of the last failed call on this thread; empty after a success. */
LD_API const char* ld_last_error(void);
/* Stable lower-case name of a status, e.g. "not_found". */
LD_API const char* ld_status_name(ld_status status);
LD_API const char* ld_version(void);

/* Every char** output is a NUL-terminated UTF-8 string (JSON unless stated
 * otherwise) owned by the caller and released with ld_string_free. Outputs
 * are left NULL on failure. */
LD_API void ld_string_free(char* text);

/* Refs are written "node/local/version", or "local/version" for this node. */

LD_API ld_status ld_node_init(const char* root, const char* descriptor_json, ld_node** out);
LD_API ld_status ld_node_open(const char* root, ld_node** out);
LD_API void ld_node_close(ld_node* node);
LD_API ld_status ld_node_descriptor(ld_node* node, char** out_json);

/* Stores raw bytes in SREP. section: low_quality, external_language or
 * external_reference. Output: the repository entry. */
LD_API ld_status ld_collect(ld_node* node, const char* bytes, size_t length, const char* section,
                            const char* local_id, unsigned version, const char* provenance, char** out_json);

/* sources_json: array of SREP refs. Output: array of the S, L, K, G entries. */
LD_API ld_status ld_transform(ld_node* node, const char* sources_json, const char* config_json, char** out_json);

/* fields_json: {"title": {tag: text}, "description": {...}, "categories": [...],
 * "license": "..."}. policy: automatic or request.
 * Output: {"entry": ..., "warnings": [...]}. */
LD_API ld_status ld_distribute(ld_node* node, const char* ref, const char* fields_json, const char* policy,
                               char** out_json);

/* partition: srep, crep or drep. kind may be NULL. */
LD_API ld_status ld_list(ld_node* node, const char* partition, const char* kind, char** out_json);
/* Output: array of {"rule", "detail"}; empty when the repository is sound. */
LD_API ld_status ld_check(ld_node* node, char** out_json);

/* Runs a request against this node's catalogue API without a server.
 * path may carry a query string. The body is returned as-is. */
LD_API ld_status ld_catalogue_get(ld_node* node, const char* path, int* out_status, char** out_body);
/* Same for any method. body may be NULL. The response body may hold NUL
 * bytes (downloads); its length goes to out_length, which may be NULL. */
LD_API ld_status ld_catalogue_request(ld_node* node, const char* method, const char* path, const char* body,
                                      size_t body_length, int* out_status, char** out_body, size_t* out_length);

/* query: URL query string as accepted by GET /api/v1/datasets. */
LD_API ld_status ld_search_peer(ld_node* node, const char* peer_id, const char* query, char** out_json);
/* token may be NULL. Output: {"ref", "content_hash", "stored"}. */
LD_API ld_status ld_fetch(ld_node* node, const char* ref, const char* token, char** out_json);
/* graph_local_id may be NULL. Output: the CREP entry of the new graph. */
LD_API ld_status ld_cross_compose(ld_node* node, const char* standardised, const char* knowledge,
                                  const char* language, const char* fields_json, const char* policy,
                                  const char* graph_local_id, char** out_json);

LD_API ld_status ld_peer_add(ld_node* node, const char* descriptor_json);
LD_API ld_status ld_peer_remove(ld_node* node, const char* node_id);
LD_API ld_status ld_peer_list(ld_node* node, char** out_json);

LD_API ld_status ld_request_list(ld_node* node, char** out_json);
/* approve != 0 approves, else denies. Output: the updated request. */
LD_API ld_status ld_request_decide(ld_node* node, const char* request_id, int approve, char** out_json);

/* Serves the catalogue on a background thread; port 0 picks a free port. */
LD_API ld_status ld_serve_start(ld_node* node, const char* host, int port, int* out_port);
LD_API ld_status ld_serve_stop(ld_node* node);

#ifdef __cplusplus
}
#endif

#endif
