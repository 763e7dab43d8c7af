#include "gentune/config.hpp"
#include "gentune/derive.hpp"
#include "gentune/job.hpp"
#include "gentune/sampler.hpp"
#include "gentune/surface/parser.hpp"
#include "gentune/weights_io.hpp"
#include "gentune/workloads.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace gentune;

namespace {

// Usage problems (bad flags, unreadable or malformed inputs) exit 1; numeric
// failures during inference or training exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::vector<std::string> program;
  std::string workload;
  std::string weights = "uniform";
  std::uint64_t seed = 0;
  std::size_t n = 1000;
  std::string out;
  std::string validity, feature;
};

std::shared_ptr<const surface::Program> program_of(const Common& c) {
  if (!c.workload.empty()) return load_workload(find_workload(c.workload));
  if (c.program.empty()) throw UsageError("--program or --workload is required");
  for (const auto& f : c.program)
    if (!std::filesystem::exists(f)) throw UsageError("no such file: " + f);
  return load_program(c.program);
}

WeightVector weights_of(const Common& c, const WeightTable& table) {
  if (c.weights == "uniform" || c.weights.empty()) return table.initial_vector();
  if (!std::filesystem::exists(c.weights)) throw UsageError("no such weights file: " + c.weights);
  std::vector<std::string> unknown;
  WeightVector w = read_weights(c.weights, table, &unknown);
  for (const auto& u : unknown) std::cerr << "warning: weights file names unknown weight " << u << "\n";
  return w;
}

std::string validity_of(const Common& c) {
  if (!c.validity.empty() || c.workload.empty()) return c.validity;
  return find_workload(c.workload).validity;
}

// Writes to --out when given, otherwise stdout.
template <class F>
void emit(const std::string& out, F&& body) {
  if (out.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream f(out);
  if (!f) throw UsageError("cannot write " + out);
  body(f);
}

void add_common(CLI::App* sub, Common& c, bool weights, bool sampling) {
  sub->add_option("--program", c.program, "generator file(s): the program first, then helper files");
  sub->add_option("--workload", c.workload, "builtin workload name instead of --program");
  if (weights) sub->add_option("--weights", c.weights, "weights JSON file, or 'uniform'");
  if (sampling) {
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--n", c.n, "number of samples");
  }
  sub->add_option("--out", c.out, "output file (default: stdout)");
}

int run(int argc, char** argv) {
  CLI::App app{"gentune: compile, infer and tune generators written with symbolic weights"};
  app.require_subcommand(1);
  Common c;

  // derive
  auto* derive = app.add_subcommand("derive", "derive a dependency-weighted generator from type declarations");
  std::string types_file, root, derive_config;
  unsigned size = 4, lookback = 2;
  derive->add_option("--program", types_file, "file with type declarations")->required();
  derive->add_option("--config", derive_config, "config file with a [derive] section (root, size, lookback)");
  derive->add_option("--root", root, "type to generate");
  derive->add_option("--size", size, "initial size");
  derive->add_option("--lookback", lookback, "call-stack lookback length");
  derive->add_option("--out", c.out, "output file (default: stdout)");

  // compile
  auto* compile = app.add_subcommand("compile", "compile a generator and report its size");
  std::string dump_bdd, fn;
  add_common(compile, c, false, false);
  compile->add_option("--fn", fn, "compile fn applied to main instead of main");
  compile->add_option("--dump-bdd", dump_bdd, "write the diagram in DOT format to this file");

  // infer
  auto* infer = app.add_subcommand("infer", "print the exact output distribution");
  add_common(infer, c, true, false);
  infer->add_option("--feature", c.feature, "print the distribution of this function of the output");

  // train
  auto* trainc = app.add_subcommand("train", "tune weights as described by a config file");
  std::string config;
  std::optional<std::uint64_t> train_seed;
  trainc->add_option("--config", config, "training config")->required();
  trainc->add_option("--seed", train_seed, "override [train] seed");
  trainc->add_option("--out", c.out, "override [io] weights_out");

  // sample
  auto* sample = app.add_subcommand("sample", "draw samples, one value per line");
  add_common(sample, c, true, true);

  // report
  auto* report = app.add_subcommand("report", "cumulative unique / valid counts as CSV");
  add_common(report, c, true, true);
  report->add_option("--validity", c.validity, "validity function (default: the workload's)");

  auto* list = app.add_subcommand("workloads", "list builtin workloads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*derive) {
    if (!derive_config.empty()) {
      ConfigDoc doc = parse_config(surface::read_file(derive_config), derive_config);
      if (root.empty()) root = doc.get_string("derive", "root", "");
      if (derive->count("--size") == 0) size = static_cast<unsigned>(doc.get_number("derive", "size", size));
      if (derive->count("--lookback") == 0)
        lookback = static_cast<unsigned>(doc.get_number("derive", "lookback", lookback));
    }
    if (root.empty()) throw UsageError("derive needs --root (or root in the [derive] section)");
    surface::Program types = surface::parse_program(surface::read_file(types_file), types_file);
    DerivedGenerator d = derive_generator(types, {root, size, lookback});
    emit(c.out, [&](std::ostream& os) { os << d.text; });
    // Recount from the compiled program: live weights after lowering.
    auto p = std::make_shared<surface::Program>();
    surface::parse_program(d.text, "<derived>", *p);
    Model m(p);
    std::cerr << "locations " << d.locations << ", weights " << m.table().size() << "\n";
    return 0;
  }

  if (*compile) {
    auto p = program_of(c);
    WeightTable table;
    CompiledSurface cs = compile_surface(*p, fn.empty() ? surface::main_ref() : surface::parse_expr("(" + fn + " main)", *p),
                                         table);
    std::size_t nodes = cs.prog.mgr->node_count(cs.prog.roots);
    emit(c.out, [&](std::ostream& os) {
      os << "output_bits " << cs.prog.width() << "\nflips " << cs.flips << "\ngates " << cs.gates << "\nweights "
         << table.size() << "\nbdd_nodes " << nodes << "\n";
    });
    if (!dump_bdd.empty()) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < table.size(); ++i) names.push_back(table.name(static_cast<WeightId>(i)));
      std::ofstream dot(dump_bdd);
      if (!dot) throw UsageError("cannot write " + dump_bdd);
      dot << cs.prog.mgr->to_dot(cs.prog.roots, names);
    }
    return 0;
  }

  if (*infer) {
    Model m(program_of(c));
    WeightVector w = weights_of(c, m.table());
    Distribution d = c.feature.empty() ? m.exact(w) : m.push_forward(c.feature, w);
    emit(c.out, [&](std::ostream& os) {
      os << std::setprecision(12);
      for (const auto& [v, pr] : d) os << v.str() << "\t" << pr << "\n";
    });
    return 0;
  }

  if (*trainc) {
    if (!std::filesystem::exists(config)) throw UsageError("no such config: " + config);
    TrainingJob job = load_training_job(config);
    if (train_seed) job.train.seed = *train_seed;
    if (!c.out.empty()) job.weights_out = c.out;
    JobOutcome o = run_training_job(job, &std::cerr);
    const auto& t = o.result.trace;
    if (!t.empty()) std::cerr << "final objective " << t.back().objective << " after " << t.size() << " epochs\n";
    return 0;
  }

  if (*sample || *report) {
    auto p = program_of(c);
    WeightTable table;
    // Compiling registers every weight name the program uses, so a weights
    // file can be checked against them.
    compile_surface(*p, surface::main_ref(), table);
    WeightVector w = weights_of(c, table);
    std::string validity = *report ? validity_of(c) : "";
    SampleBatch b = sample_batch(*p, table, w, c.n, c.seed, validity);
    emit(c.out, [&](std::ostream& os) {
      if (*sample) {
        for (const auto& s : b.samples) os << s.value.str() << "\n";
        return;
      }
      Report r = empirical_report(b);
      os << "samples,unique,unique_valid,validity_rate\n";
      for (const auto& row : r.curve)
        os << row.samples << "," << row.unique << "," << row.unique_valid << "," << row.validity_rate << "\n";
    });
    return 0;
  }

  if (*list) {
    for (const auto& w : builtin_workloads()) std::cout << w.name << "\t" << w.description << "\n";
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const surface::SurfaceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DeriveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const TrainError& e) {
    std::cerr << "numeric failure at epoch " << e.epoch << ": " << e.what() << "\n";
    return 2;
  } catch (const ObjectiveError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
