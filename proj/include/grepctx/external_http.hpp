#pragma once

#include <stdexcept>
#include <string>

#include <httplib.h>

#include "grepctx/external.hpp"

namespace grepctx {

/// HTTP transport: POSTs the request object to the endpoint and parses the
/// response body as one protocol line.
inline QuerySet fetch_external_queries_http(const std::string& endpoint,
                                            const CompletionTask& task, int m,
                                            std::vector<std::string>* warnings = nullptr) {
  auto scheme_end = endpoint.find("://");
  auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string base = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

  httplib::Client client(base);
  client.set_read_timeout(30, 0);
  auto res = client.Post(path, external_request_json(task, m), "application/json");
  if (!res || res->status != 200)
    throw std::runtime_error("external generator: HTTP request to " + endpoint + " failed" +
                             (res ? " (status " + std::to_string(res->status) + ")" : ""));
  std::string body = res->body;
  auto nl = body.find('\n');
  if (nl != std::string::npos) body.resize(nl);
  return parse_external_queries(task.task_id, parse_external_response(body), m, warnings);
}

/// Endpoint dispatch: http(s):// endpoints go over HTTP, anything else is run
/// as a subprocess command (one process per task, line protocol on stdio).
inline QuerySet fetch_external_queries(const std::string& endpoint, const CompletionTask& task,
                                       int m, std::vector<std::string>* warnings = nullptr) {
  if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0)
    return fetch_external_queries_http(endpoint, task, m, warnings);
  return fetch_external_queries_subprocess(endpoint, task, m, warnings);
}

}  // namespace grepctx
