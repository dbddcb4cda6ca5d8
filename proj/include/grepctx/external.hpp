#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grepctx/querygen.hpp"

#ifdef __unix__
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace grepctx {

/// One request line of the external-generator protocol.
inline std::string external_request_json(const CompletionTask& task, int m) {
  nlohmann::json req = {{"task_id", task.task_id},
                        {"local_context", task.local_context},
                        {"language", language_name(task.language)},
                        {"m", m}};
  return req.dump();
}

/// Parses one response line: {"task_id": str, "commands": [{"pattern": str,
/// "case_sensitive": bool}]}. Throws std::runtime_error on malformed payload,
/// naming the offending record.
inline ExternalResponse parse_external_response(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("external generator: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("task_id") || !j["task_id"].is_string() ||
      !j.contains("commands") || !j["commands"].is_array())
    throw std::runtime_error("external generator: malformed response object: " + line);
  ExternalResponse resp;
  resp.task_id = j["task_id"].get<std::string>();
  for (const auto& c : j["commands"]) {
    if (!c.is_object() || !c.contains("pattern") || !c["pattern"].is_string())
      throw std::runtime_error("external generator: malformed command record: " + c.dump());
    ExternalCommand cmd;
    cmd.pattern = c["pattern"].get<std::string>();
    cmd.case_sensitive = c.value("case_sensitive", true);
    resp.commands.push_back(std::move(cmd));
  }
  return resp;
}

#ifdef __unix__
/// Runs `command` once, writes the request line to its stdin, reads one
/// response line from its stdout. One subprocess per task.
inline std::string exchange_with_subprocess(const std::string& command,
                                            const std::string& request_line) {
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw std::runtime_error("external generator: pipe failed");
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("external generator: fork failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  std::string req = request_line + "\n";
  ssize_t ignored = write(to_child[1], req.data(), req.size());
  (void)ignored;
  close(to_child[1]);
  std::string out;
  char buf[4096];
  ssize_t n;
  while ((n = read(from_child[0], buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  close(from_child[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw std::runtime_error("external generator: subprocess failed: " + command);
  auto nl = out.find('\n');
  return nl == std::string::npos ? out : out.substr(0, nl);
}
#endif

inline QuerySet fetch_external_queries_subprocess(const std::string& command,
                                                  const CompletionTask& task, int m,
                                                  std::vector<std::string>* warnings = nullptr) {
#ifdef __unix__
  std::string reply = exchange_with_subprocess(command, external_request_json(task, m));
  return parse_external_queries(task.task_id, parse_external_response(reply), m, warnings);
#else
  (void)command;
  (void)task;
  (void)m;
  (void)warnings;
  throw std::runtime_error("external generator subprocess bridge requires a POSIX platform");
#endif
}

}  // namespace grepctx
