#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace grepctx {

enum class Language { python, java, other };

inline const char* language_name(Language l) {
  switch (l) {
    case Language::python: return "python";
    case Language::java: return "java";
    default: return "other";
  }
}

inline Language language_from_name(const std::string& name) {
  if (name == "python") return Language::python;
  if (name == "java") return Language::java;
  return Language::other;
}

inline Language language_from_extension(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot == std::string::npos) return Language::other;
  std::string ext = path.substr(dot);
  if (ext == ".py" || ext == ".pyi") return Language::python;
  if (ext == ".java") return Language::java;
  return Language::other;
}

/// One file of the snapshot. Lines are 1-based everywhere; lines[i-1] is line i.
struct SourceFile {
  std::string path;  // relative to the snapshot root, '/' separators
  std::vector<std::string> lines;
  Language language = Language::other;
};

struct RepoSnapshot {
  std::string root;
  std::vector<SourceFile> files;  // sorted lexicographically by path
  std::uint64_t total_lines = 0;
  std::set<Language> language_filter;

  const SourceFile* find(const std::string& path) const {
    auto it = std::lower_bound(files.begin(), files.end(), path,
                               [](const SourceFile& f, const std::string& p) { return f.path < p; });
    if (it == files.end() || it->path != path) return nullptr;
    return &*it;
  }
};

struct ScanOptions {
  std::vector<std::string> ignore_globs;  // matched against relative paths
  std::set<Language> language_filter;     // empty = accept every language
  std::size_t max_file_bytes = 4 * 1024 * 1024;
};

namespace detail {

// Shell-style glob over a whole relative path: '*' and '?' match any
// character including '/'; enough for patterns like "tests/*" or "*.min.js".
inline bool glob_match(const std::string& pattern, const std::string& text) {
  std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

inline bool looks_binary(const std::string& head) {
  return head.find('\0') != std::string::npos;
}

// Replaces invalid UTF-8 sequences with U+FFFD, in place over a byte string.
inline std::string sanitize_utf8(const std::string& in) {
  static const std::string replacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    unsigned char c = static_cast<unsigned char>(in[i]);
    std::size_t len = 0;
    if (c < 0x80) len = 1;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
    if (len == 0) {
      out += replacement;
      ++i;
      continue;
    }
    if (i + len > in.size()) {
      out += replacement;
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(in[i + k]) & 0xC0) != 0x80) ok = false;
    if (ok) {
      out.append(in, i, len);
      i += len;
    } else {
      out += replacement;
      ++i;
    }
  }
  return out;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = (nl == std::string::npos) ? text.size() : nl;
    std::size_t len = end - pos;
    if (len > 0 && text[pos + len - 1] == '\r') --len;
    lines.emplace_back(text, pos, len);
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return lines;
}

}  // namespace detail

/// Builds a snapshot directly from in-memory files. Used by scan_repo and by
/// synthetic-corpus generators; files are sorted and totals recomputed here.
inline RepoSnapshot make_snapshot(std::string root, std::vector<SourceFile> files,
                                  std::set<Language> language_filter = {}) {
  RepoSnapshot snap;
  snap.root = std::move(root);
  snap.files = std::move(files);
  snap.language_filter = std::move(language_filter);
  std::sort(snap.files.begin(), snap.files.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
  for (const auto& f : snap.files) snap.total_lines += f.lines.size();
  return snap;
}

inline RepoSnapshot scan_repo(const std::filesystem::path& root, const ScanOptions& opts = {},
                              std::vector<std::string>* warnings = nullptr) {
  namespace fs = std::filesystem;
  if (!fs::exists(root) || !fs::is_directory(root))
    throw std::runtime_error("scan_repo: not a directory: " + root.string());

  static const std::vector<std::string> vcs_dirs = {".git", ".hg", ".svn"};
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  std::vector<SourceFile> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied), end;
  for (; it != end; ++it) {
    const fs::path& p = it->path();
    std::string name = p.filename().string();
    if (it->is_directory()) {
      if (std::find(vcs_dirs.begin(), vcs_dirs.end(), name) != vcs_dirs.end()) it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    std::string rel = fs::relative(p, root).generic_string();
    bool ignored = false;
    for (const auto& g : opts.ignore_globs)
      if (detail::glob_match(g, rel)) {
        ignored = true;
        break;
      }
    if (ignored) continue;
    Language lang = language_from_extension(rel);
    if (!opts.language_filter.empty() && !opts.language_filter.count(lang)) continue;

    std::error_code ec;
    auto size = fs::file_size(p, ec);
    if (ec) {
      warn("unreadable: " + rel);
      continue;
    }
    if (size > opts.max_file_bytes) {
      warn("skipped (size cap): " + rel);
      continue;
    }
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      warn("unreadable: " + rel);
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    if (detail::looks_binary(content.substr(0, 8192))) continue;
    SourceFile f;
    f.path = std::move(rel);
    f.language = lang;
    f.lines = detail::split_lines(detail::sanitize_utf8(content));
    files.push_back(std::move(f));
  }
  return make_snapshot(root.string(), std::move(files), opts.language_filter);
}

struct LineInterval {
  int start = 0;  // 1-based, inclusive
  int end = 0;    // inclusive
};

inline std::string slice(const RepoSnapshot& snap, const std::string& path, LineInterval iv) {
  const SourceFile* f = snap.find(path);
  if (!f) throw std::out_of_range("slice: no such file in snapshot: " + path);
  int n = static_cast<int>(f->lines.size());
  if (iv.start < 1 || iv.end < iv.start || iv.end > n)
    throw std::out_of_range("slice: interval [" + std::to_string(iv.start) + "," + std::to_string(iv.end) +
                            "] out of range for " + path + " (" + std::to_string(n) + " lines)");
  std::string out;
  for (int i = iv.start; i <= iv.end; ++i) {
    if (i > iv.start) out += '\n';
    out += f->lines[static_cast<std::size_t>(i - 1)];
  }
  return out;
}

}  // namespace grepctx
