// Command-line driver: verify, classify, conjecture, oracle, list.
// Exit status: 0 when every assertion holds, 1 when one fails, 2 on errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "modinv/harness.hpp"

namespace fs = std::filesystem;
using modinv::harness::json;

namespace {

std::uint32_t parse_field(const std::string& s, std::uint32_t p) {
  auto caret = s.find('^');
  if (caret == std::string::npos) return static_cast<std::uint32_t>(std::stoul(s));
  if (std::stoul(s.substr(0, caret)) != p) throw CLI::ValidationError("--field", "characteristic differs from --p");
  return static_cast<std::uint32_t>(std::stoul(s.substr(caret + 1)));
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw modinv::Error(modinv::Errc::InvalidInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw modinv::Error(modinv::Errc::InvalidInput, std::string("malformed job: ") + e.what());
  }
}

void emit(const json& report, const std::string& format, const std::string& out, const std::string& stem) {
  std::string js = report.dump(2) + "\n";
  std::string tx = modinv::harness::render_text(report);
  std::cout << (format == "json" ? js : tx);
  if (!out.empty()) std::ofstream(out) << js;
  if (const char* dir = std::getenv("MODINV_REPORT_DIR"); dir && *dir) {
    fs::create_directories(dir);
    std::ofstream(fs::path(dir) / (stem + ".json")) << js;
    std::ofstream(fs::path(dir) / (stem + ".txt")) << tx;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariants of three-dimensional modular representations of elementary abelian p-groups"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text", out;
  app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", out, "also write the JSON report here");

  modinv::harness::Options opt;
  std::string theorem, field, input;
  std::uint32_t max_degree = 12;
  int oracle_degree = -1;

  auto* v = app.add_subcommand("verify", "check the stated identities of one result");
  v->add_option("theorem", theorem, "theorem id (see `list`)")->required();
  v->add_option("--p", opt.p, "characteristic");
  v->add_option("--r", opt.r, "rank (0 = the result's default)");
  v->add_option("--field", field, "specialization field: k or p^k");
  v->add_option("--trials", opt.trials, "random specializations");
  v->add_option("--seed", opt.seed, "random seed");
  v->add_flag("--timings", opt.timings, "include wall-clock timings");

  auto* c = app.add_subcommand("classify", "classify a representation and construct its invariants");
  c->add_option("--input", input, "job file")->required();
  c->add_option("--oracle-degree", oracle_degree, "also compare Hilbert functions up to this degree");
  c->add_flag("--timings", opt.timings, "include wall-clock timings");

  auto* k = app.add_subcommand("conjecture", "evidence for the complete-intersection pattern");
  k->add_option("--p", opt.p, "characteristic");
  k->add_option("--r", opt.r, "rank (default 4)");
  k->add_option("--field", field, "field degree: k or p^k");
  k->add_option("--trials", opt.trials, "random representations");
  k->add_option("--seed", opt.seed, "random seed");
  k->add_flag("--timings", opt.timings, "include wall-clock timings");

  auto* o = app.add_subcommand("oracle", "compare invariant dimensions with lead-term-algebra counts");
  o->add_option("--input", input, "job file")->required();
  o->add_option("--max-degree", max_degree, "largest degree compared");

  auto* l = app.add_subcommand("list", "supported theorem ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!field.empty()) opt.k = parse_field(field, opt.p);
    json report;
    std::string stem;
    if (v->parsed()) {
      report = modinv::harness::verify(theorem, opt);
      stem = "verify-" + theorem + "-p" + std::to_string(opt.p) + "-seed" + std::to_string(opt.seed);
    } else if (c->parsed()) {
      json job = read_json(input);
      if (oracle_degree >= 0) job["oracle_degree"] = oracle_degree;
      report = modinv::harness::classify(job, opt.timings);
      stem = "classify-" + fs::path(input).stem().string();
    } else if (k->parsed()) {
      report = modinv::harness::conjecture(opt);
      stem = "conjecture-p" + std::to_string(opt.p) + "-r" + std::to_string(opt.r ? opt.r : 4) + "-seed" +
             std::to_string(opt.seed);
    } else if (o->parsed()) {
      report = modinv::harness::oracle(read_json(input), max_degree);
      stem = "oracle-" + fs::path(input).stem().string();
    } else if (l->parsed()) {
      for (auto& id : modinv::harness::supported_theorems()) std::cout << id << "\n";
      return 0;
    }
    emit(report, format, out, stem);
    return modinv::harness::passed(report) ? 0 : 1;
  } catch (const modinv::Error& e) {
    json err = {{"error", modinv::errc_name(e.code())}, {"message", e.what()}};
    (format == "json" ? std::cout : std::cerr) << err.dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err = {{"error", "Internal"}, {"message", e.what()}};
    (format == "json" ? std::cout : std::cerr) << err.dump(2) << "\n";
    return 2;
  }
}
