#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "grepctx/corpus.hpp"

using namespace grepctx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / fs::path("grepctx_corpus_" + std::to_string(::getpid()) +
                                                "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  void write(const std::string& rel, const std::string& content) const {
    fs::path p = path / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
  }
};

}  // namespace

TEST_CASE("scan_repo on empty directory") {
  TempDir dir;
  auto snap = scan_repo(dir.path);
  CHECK(snap.files.empty());
  CHECK(snap.total_lines == 0);
}

TEST_CASE("scan_repo counts lines of a single python file") {
  TempDir dir;
  dir.write("a.py", "one\ntwo\nthree\n");
  ScanOptions opts;
  opts.language_filter = {Language::python};
  auto snap = scan_repo(dir.path, opts);
  REQUIRE(snap.files.size() == 1);
  CHECK(snap.files[0].path == "a.py");
  CHECK(snap.total_lines == 3);
}

TEST_CASE("language filter keeps only matching files") {
  TempDir dir;
  dir.write("a.py", "x = 1\n");
  dir.write("B.java", "class B {}\n");
  ScanOptions opts;
  opts.language_filter = {Language::python};
  auto snap = scan_repo(dir.path, opts);
  REQUIRE(snap.files.size() == 1);
  CHECK(snap.files[0].path == "a.py");
  CHECK(snap.files[0].language == Language::python);
}

TEST_CASE("scan_repo throws on missing root") {
  CHECK_THROWS_AS(scan_repo("/no/such/dir/grepctx"), std::runtime_error);
}

TEST_CASE("vcs metadata and ignore globs are skipped") {
  TempDir dir;
  dir.write(".git/config", "bare = false\n");
  dir.write("vendor/big.py", "x = 1\n");
  dir.write("keep.py", "y = 2\n");
  ScanOptions opts;
  opts.ignore_globs = {"vendor/*"};
  auto snap = scan_repo(dir.path, opts);
  REQUIRE(snap.files.size() == 1);
  CHECK(snap.files[0].path == "keep.py");
}

TEST_CASE("binary files are excluded, oversized files skipped with warning") {
  TempDir dir;
  dir.write("bin.dat", std::string("ab\0cd", 5));
  dir.write("big.py", std::string(64, 'x') + "\n");
  dir.write("ok.py", "fine\n");
  ScanOptions opts;
  opts.max_file_bytes = 32;
  std::vector<std::string> warnings;
  auto snap = scan_repo(dir.path, opts, &warnings);
  REQUIRE(snap.files.size() == 1);
  CHECK(snap.files[0].path == "ok.py");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("big.py") != std::string::npos);
}

TEST_CASE("invalid utf-8 is replaced, never dropped") {
  TempDir dir;
  dir.write("bad.py", std::string("a\xFF") + "b\n");
  auto snap = scan_repo(dir.path);
  REQUIRE(snap.files.size() == 1);
  CHECK(snap.files[0].lines[0] == "a\xEF\xBF\xBD""b");
}

TEST_CASE("file ordering is lexicographic and rescans are identical") {
  TempDir dir;
  dir.write("z.py", "1\n2\n");
  dir.write("a/m.py", "3\n");
  dir.write("a/b.py", "4\n");
  auto s1 = scan_repo(dir.path);
  auto s2 = scan_repo(dir.path);
  REQUIRE(s1.files.size() == 3);
  CHECK(s1.files[0].path == "a/b.py");
  CHECK(s1.files[1].path == "a/m.py");
  CHECK(s1.files[2].path == "z.py");
  REQUIRE(s1.files.size() == s2.files.size());
  for (std::size_t i = 0; i < s1.files.size(); ++i) {
    CHECK(s1.files[i].path == s2.files[i].path);
    CHECK(s1.files[i].lines == s2.files[i].lines);
  }
  CHECK(s1.total_lines == s2.total_lines);
}

TEST_CASE("slice returns exact line ranges") {
  auto snap = make_snapshot("mem", {{"f.py", {"l1", "l2", "l3", "l4", "l5"}, Language::python}});
  CHECK(slice(snap, "f.py", {1, 5}) == "l1\nl2\nl3\nl4\nl5");
  CHECK(slice(snap, "f.py", {2, 2}) == "l2");
  CHECK_THROWS_AS(slice(snap, "f.py", {4, 6}), std::out_of_range);
  CHECK_THROWS_AS(slice(snap, "missing.py", {1, 1}), std::out_of_range);
}

TEST_CASE("slice concatenation property") {
  auto snap = make_snapshot("mem", {{"f.py", {"a", "bb", "ccc", "dddd", "e", "ff", "g"}}});
  for (int a = 1; a <= 7; ++a)
    for (int b = a; b < 7; ++b)
      for (int c = b + 1; c <= 7; ++c)
        CHECK(slice(snap, "f.py", {a, b}) + "\n" + slice(snap, "f.py", {b + 1, c}) ==
              slice(snap, "f.py", {a, c}));
}

TEST_CASE("split_lines handles crlf and missing trailing newline") {
  auto lines = detail::split_lines("a\r\nb\nc");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "a");
  CHECK(lines[1] == "b");
  CHECK(lines[2] == "c");
  CHECK(detail::split_lines("").empty());
}
