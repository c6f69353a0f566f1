#include "tcsem/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcsem/accumulator.hpp"
#include "tcsem/discriminator.hpp"
#include "tcsem/errorcorrect.hpp"
#include "tcsem/mma.hpp"
#include "tcsem/numeric_text.hpp"
#include "tcsem/smtgen.hpp"

namespace tcsem {

namespace {

// Options shared by every subcommand that evaluates the unit.
struct ConfigOptions {
  std::string arch = "volta";
  std::optional<int> k;
  std::optional<int> guard;
  std::optional<int> carry;
  std::string out_precision;

  void add_to(CLI::App* app, bool with_output) {
    app->add_option("--arch", arch, "volta, turing or ampere")->check(CLI::IsMember({"volta", "turing", "ampere"}));
    app->add_option("--k", k, "products per dot step");
    app->add_option("--guard-bits", guard, "bits kept below the aligned significand");
    app->add_option("--carry-bits", carry, "carry headroom of the sum field");
    if (with_output) {
      app->add_option("--out-precision", out_precision, "f32 (default) or f16")->check(CLI::IsMember({"f32", "f16"}));
    }
  }

  bool overridden() const { return k || guard || carry; }

  AccumulatorConfig resolve() const {
    AccumulatorConfig cfg = preset_config(parse_arch(arch));
    if (k) cfg.k_products = *k;
    if (guard) cfg.guard_bits = *guard;
    if (carry) cfg.carry_bits = *carry;
    if (out_precision == "f16") cfg.out_precision = OutputPrecision::f16;
    validate(cfg);
    return cfg;
  }

  /// File-name label: the preset name, with the overrides appended when present.
  std::string label() const {
    if (!overridden()) return arch;
    const AccumulatorConfig cfg = resolve();
    return arch + "-k" + std::to_string(cfg.k_products) + "-g" + std::to_string(cfg.guard_bits) + "-w" +
           std::to_string(cfg.carry_bits);
  }
};

struct Emitter {
  std::ostream& out;
  std::string path;

  void write(const std::string& text) const {
    if (path.empty()) {
      out << text;
    } else {
      write_file_atomic(path, text);
    }
  }
};

// Counts such as 1e7 or 1000000; the value must be a non-negative integer.
std::uint64_t parse_count(const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !(v >= 0) || v != std::floor(v) || v > 1.8e19) {
    throw ParseError("expected a non-negative integer count, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

int parse_int(std::string_view text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::pair<std::string, std::string> split_colon(const std::string& text, const char* what) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw ParseError(std::string("expected ") + what + ", got '" + text + "'");
  }
  return {text.substr(0, colon), text.substr(colon + 1)};
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto [lo, hi] = split_colon(text, "lo:hi");
  const std::pair<int, int> r{parse_int(lo), parse_int(hi)};
  if (r.first > r.second) throw ParseError("empty exponent range " + text);
  return r;
}

std::vector<F16Bits> padded_f16(const std::string& text, int k, const char* name) {
  std::vector<F16Bits> v = text.empty() ? std::vector<F16Bits>{} : parse_float_list<Binary16>(text);
  if (static_cast<int>(v.size()) > k) {
    throw ParseError(std::string("--") + name + " has " + std::to_string(v.size()) + " elements, k is " +
                     std::to_string(k));
  }
  v.resize(static_cast<std::size_t>(k), F16Bits{0});
  return v;
}

template <class Bits>
nlohmann::ordered_json hex_list(const std::vector<Bits>& v) {
  auto j = nlohmann::ordered_json::array();
  for (const Bits& x : v) j.push_back(format_hex(x));
  return j;
}

// ---- dot ------------------------------------------------------------------

struct DotOptions {
  ConfigOptions config;
  std::string a;
  std::string b;
  std::string c = "0";
  bool trace = false;
  std::string format = "text";
  std::string output;
};

int cmd_dot(const DotOptions& o, std::ostream& out) {
  const AccumulatorConfig cfg = o.config.resolve();
  const std::vector<F16Bits> a = padded_f16(o.a, cfg.k_products, "a");
  const std::vector<F16Bits> b = padded_f16(o.b, cfg.k_products, "b");
  const MixedScalar c = parse_mixed(o.c, Width::f32);
  const DotTrace tr = tensor_dot_traced(a, b, c, cfg);
  std::string text;
  if (o.format == "records") {
    nlohmann::ordered_json j;
    j["config"] = describe(cfg);
    j["a"] = hex_list(a);
    j["b"] = hex_list(b);
    j["c"] = format_hex(c);
    j["result"] = format_hex(tr.result);
    j["value"] = format_pow2(tr.result);
    j["exact"] = format_pow2(exact_dot(a, b, c));
    text = j.dump() + "\n";
  } else if (o.trace) {
    text = format_trace(tr);
  } else {
    text = "result " + std::string(std::holds_alternative<F16Bits>(tr.result) ? "f16 " : "f32 ") +
           format_hex(tr.result) + " " + format_pow2(tr.result) + "\n";
  }
  Emitter{out, o.output}.write(text);
  return kExitOk;
}

// ---- mma ------------------------------------------------------------------

struct MmaOptions {
  ConfigOptions config;
  std::string a;
  std::string b;
  std::string c;
  std::string order = "ascending";
  std::string output;
};

int cmd_mma(const MmaOptions& o, std::ostream& out) {
  const AccumulatorConfig cfg = o.config.resolve();
  const Matrix a = read_matrix_file(o.a);
  const Matrix b = read_matrix_file(o.b);
  const ElementType d_type = cfg.out_precision == OutputPrecision::f16 ? ElementType::f16 : ElementType::f32;
  const Matrix c = o.c.empty() ? Matrix(a.rows(), b.cols(), d_type) : read_matrix_file(o.c);
  const SliceOrder order = o.order == "descending" ? SliceOrder::descending : SliceOrder::ascending;
  Emitter{out, o.output}.write(write_matrix_csv(gemm_chained(a, b, c, cfg, order)));
  return kExitOk;
}

// ---- search ---------------------------------------------------------------

struct SearchOptions {
  ConfigOptions config;
  std::string property;
  std::string compare;
  std::uint64_t seed = 1;
  std::size_t limit = 1;
  std::string trials = "1e6";
  std::string exp_range;
  bool exhaustive = false;
  std::string pins;
  unsigned threads = 0;
  std::string check;
  std::string format = "text";
  std::string output;
};

ProbeContext probe_context(const ConfigOptions& config, const std::string& compare) {
  ProbeContext ctx;
  ctx.config = config.resolve();
  ctx.config.out_precision = OutputPrecision::f32;
  if (!compare.empty()) ctx.compare = split_colon(compare, "first:second");
  return ctx;
}

int cmd_search(const SearchOptions& o, std::ostream& out) {
  const PropertyId prop = parse_property(o.property);
  const ProbeContext ctx = probe_context(o.config, o.compare);
  const Emitter emit{out, o.output};
  if (!o.check.empty()) {
    const Witness w = check_witness(prop, parse_assignment(prop, o.check, ctx), ctx);
    emit.write(o.format == "records" ? format_witness_record(w) + "\n" : format_witness_text(w));
    return w.discriminates ? kExitOk : kExitNoWitness;
  }
  SearchConfig sc;
  sc.mode = o.exhaustive ? SearchMode::exhaustive : SearchMode::random;
  sc.seed = o.seed;
  sc.limit = o.limit;
  sc.trials = parse_count(o.trials);
  if (!o.exp_range.empty()) sc.exponent_range = parse_range(o.exp_range);
  if (!o.pins.empty()) sc.pins = parse_assignment(prop, o.pins, ctx);
  sc.threads = o.threads;
  const SearchResult r = search(prop, sc, ctx);
  emit.write(o.format == "records" ? format_search_records(r) : format_search_text(r));
  return r.found() ? kExitOk : kExitNoWitness;
}

// ---- emit-smt -------------------------------------------------------------

struct EmitOptions {
  ConfigOptions config;
  std::string property;
  bool all = false;
  std::string compare;
  std::string output;
  std::string out_dir;
};

int cmd_emit_smt(const EmitOptions& o, CLI::App* app, std::ostream& out) {
  if (o.all == !o.property.empty()) throw CLI::ValidationError("exactly one of --property and --all is required");
  if (!o.property.empty()) {
    const PropertyId prop = parse_property(o.property);
    const std::string text = emit_property(prop, probe_context(o.config, o.compare), o.config.label()).render();
    if (!o.out_dir.empty()) {
      std::filesystem::create_directories(o.out_dir);
      write_file_atomic((std::filesystem::path(o.out_dir) / smt_file_name(prop, o.config.label())).string(), text);
    } else {
      Emitter{out, o.output}.write(text);
    }
    return kExitOk;
  }
  if (o.out_dir.empty()) throw CLI::ValidationError("--all writes one file per property and needs --out-dir");
  std::vector<ConfigOptions> configs;
  if (app->count("--arch") > 0) {
    configs.push_back(o.config);
  } else {
    for (const char* arch : {"volta", "turing", "ampere"}) {
      ConfigOptions c = o.config;
      c.arch = arch;
      configs.push_back(c);
    }
  }
  std::filesystem::create_directories(o.out_dir);
  for (const ConfigOptions& c : configs) {
    for (const PropertyId prop : kAllProperties) {
      const std::string text = emit_property(prop, probe_context(c, o.compare), c.label()).render();
      const std::string name = smt_file_name(prop, c.label());
      write_file_atomic((std::filesystem::path(o.out_dir) / name).string(), text);
      out << name << '\n';
    }
  }
  return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareOptions {
  ConfigOptions config;
  std::string a;
  std::string b;
  std::string c = "0";
  std::string random;
  std::uint64_t seed = 1;
  std::string exp_range = "-10:10";
  std::string oracle = "exact";
  std::string format = "text";
  std::string output;
};

int cmd_compare(const CompareOptions& o, std::ostream& out) {
  AccumulatorConfig cfg = o.config.resolve();
  cfg.out_precision = OutputPrecision::f32;
  const OracleMode mode = o.oracle == "binary64" ? OracleMode::binary64 : OracleMode::exact;
  std::vector<CompareInstance> instances;
  if (!o.random.empty()) {
    if (!o.a.empty() || !o.b.empty()) throw CLI::ValidationError("--random excludes --a and --b");
    const auto [lo, hi] = parse_range(o.exp_range);
    instances = random_instances(o.seed, parse_count(o.random), cfg.k_products, lo, hi);
  } else {
    CompareInstance in;
    in.a = o.a.empty() ? std::vector<F32Bits>{} : parse_float_list<Binary32>(o.a);
    in.b = o.b.empty() ? std::vector<F32Bits>{} : parse_float_list<Binary32>(o.b);
    for (auto* v : {&in.a, &in.b}) {
      if (static_cast<int>(v->size()) > cfg.k_products) throw ParseError("vector longer than k");
      v->resize(static_cast<std::size_t>(cfg.k_products), F32Bits{0});
    }
    in.c = parse_float<Binary32>(o.c);
    instances.push_back(std::move(in));
  }
  std::vector<ErrorReport> reports;
  reports.reserve(instances.size());
  for (const CompareInstance& in : instances) reports.push_back(compare_error(in.a, in.b, in.c, cfg, mode));
  const CompareSummary summary = summarize(reports);
  std::string text;
  if (o.format == "records") {
    for (const ErrorReport& r : reports) text += format_report_record(r) + "\n";
    text += format_summary_record(summary) + "\n";
  } else {
    // Random batches report only the summary; a single instance shows its details.
    if (o.random.empty()) text += format_report_text(reports.front());
    text += format_summary_text(summary);
  }
  Emitter{out, o.output}.write(text);
  return kExitOk;
}

void add_format(CLI::App* app, std::string& format) {
  app->add_option("--format", format, "text or records")->check(CLI::IsMember({"text", "records"}));
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << contents;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bit-exact tensor core arithmetic model", "tcsem"};
  app.require_subcommand(1);

  DotOptions dot;
  CLI::App* dot_cmd = app.add_subcommand("dot", "one dot-product step: sum(a*b) + c");
  dot.config.add_to(dot_cmd, true);
  dot_cmd->add_option("--a", dot.a, "FP16 list, zero-padded to k");
  dot_cmd->add_option("--b", dot.b, "FP16 list, zero-padded to k");
  dot_cmd->add_option("--c", dot.c, "addend, FP32 unless the literal says f16");
  dot_cmd->add_flag("--trace", dot.trace, "print every pipeline stage");
  add_format(dot_cmd, dot.format);
  dot_cmd->add_option("-o,--output", dot.output, "write to a file");

  MmaOptions mma;
  CLI::App* mma_cmd = app.add_subcommand("mma", "D = A*B + C chained over k-wide slices");
  mma.config.add_to(mma_cmd, true);
  mma_cmd->add_option("--a", mma.a, "f16 matrix CSV")->required();
  mma_cmd->add_option("--b", mma.b, "f16 matrix CSV")->required();
  mma_cmd->add_option("--c", mma.c, "matrix CSV, zero when omitted");
  mma_cmd->add_option("--order", mma.order, "slice order")->check(CLI::IsMember({"ascending", "descending"}));
  mma_cmd->add_option("-o,--output", mma.output, "write to a file");

  SearchOptions srch;
  CLI::App* search_cmd = app.add_subcommand("search", "look for inputs that separate two models");
  srch.config.add_to(search_cmd, false);
  search_cmd->add_option("--property", srch.property, "property name, e.g. carry-bits")->required();
  search_cmd->add_option("--compare", srch.compare, "candidate pair first:second, e.g. w3:w4");
  search_cmd->add_option("--seed", srch.seed, "random stream key");
  search_cmd->add_option("--limit", srch.limit, "witnesses to collect")->check(CLI::PositiveNumber);
  search_cmd->add_option("--trials", srch.trials, "trial budget, e.g. 1e6");
  search_cmd->add_option("--exp-range", srch.exp_range, "FP16 exponent range lo:hi");
  search_cmd->add_flag("--exhaustive", srch.exhaustive, "enumerate FP16 domains in order");
  search_cmd->add_option("--pin", srch.pins, "fixed values name=literal,...");
  search_cmd->add_option("--threads", srch.threads, "worker threads, 0 for all cores");
  search_cmd->add_option("--check", srch.check, "evaluate one assignment name=literal,... instead of searching");
  add_format(search_cmd, srch.format);
  search_cmd->add_option("-o,--output", srch.output, "write to a file");

  EmitOptions emit;
  CLI::App* emit_cmd = app.add_subcommand("emit-smt", "SMT-LIB document for a property");
  emit.config.add_to(emit_cmd, false);
  emit_cmd->add_option("--property", emit.property, "property name");
  emit_cmd->add_flag("--all", emit.all, "every property, for --arch or all presets");
  emit_cmd->add_option("--compare", emit.compare, "candidate pair first:second");
  emit_cmd->add_option("-o,--output", emit.output, "write to a file");
  emit_cmd->add_option("--out-dir", emit.out_dir, "directory for <property>_<config>.smt2 files");

  CompareOptions cmp;
  CLI::App* compare_cmd = app.add_subcommand("compare", "Markidis vs Ootomo-Yokota error on FP32 inputs");
  cmp.config.add_to(compare_cmd, false);
  compare_cmd->add_option("--a", cmp.a, "FP32 list, zero-padded to k");
  compare_cmd->add_option("--b", cmp.b, "FP32 list, zero-padded to k");
  compare_cmd->add_option("--c", cmp.c, "FP32 addend");
  compare_cmd->add_option("--random", cmp.random, "number of random instances");
  compare_cmd->add_option("--seed", cmp.seed, "random stream key");
  compare_cmd->add_option("--exp-range", cmp.exp_range, "FP32 exponent range lo:hi for --random");
  compare_cmd->add_option("--oracle", cmp.oracle, "exact or binary64")->check(CLI::IsMember({"exact", "binary64"}));
  add_format(compare_cmd, cmp.format);
  compare_cmd->add_option("-o,--output", cmp.output, "write to a file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (dot_cmd->parsed()) return cmd_dot(dot, out);
    if (mma_cmd->parsed()) return cmd_mma(mma, out);
    if (search_cmd->parsed()) return cmd_search(srch, out);
    if (emit_cmd->parsed()) return cmd_emit_smt(emit, emit_cmd, out);
    if (compare_cmd->parsed()) return cmd_compare(cmp, out);
  } catch (const std::exception& e) {
    err << "tcsem: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tcsem
