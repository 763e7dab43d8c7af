#include "gentune/workloads.hpp"

#include "gentune/surface/parser.hpp"

#include <cstdlib>
#include <filesystem>

namespace gentune {

std::string workload_dir() {
  if (const char* env = std::getenv("GENTUNE_WORKLOADS")) return env;
  return GENTUNE_WORKLOAD_DIR;
}

namespace {

Workload derived(std::string name, std::string desc, std::string types, std::string root, unsigned size,
                 std::vector<std::string> extra, std::string validity, std::vector<std::string> features) {
  Workload w;
  w.name = std::move(name);
  w.description = std::move(desc);
  w.files.push_back(std::move(types));
  for (auto& e : extra) w.files.push_back(std::move(e));
  DeriveConfig d;
  d.root = std::move(root);
  d.initial_size = size;
  d.lookback = 2;
  w.derive = d;
  w.validity = std::move(validity);
  w.features = std::move(features);
  return w;
}

std::vector<Workload> make_workloads() {
  std::vector<Workload> out;
  {
    Workload w;
    w.name = "char";
    w.description = "character generator with three nested choices over a..e";
    w.files = {"char.gen"};
    w.train.clamp = false;
    out.push_back(w);
  }
  {
    Workload w;
    w.name = "gentree";
    w.description = "color-labelled binary trees, one leaf weight per remaining size";
    w.files = {"gentree.gen"};
    w.features = {"height"};
    w.train.clamp = false;
    out.push_back(w);
  }
  {
    Workload w;
    w.name = "stlc_bespoke";
    w.description = "handwritten well-typed lambda term generator with size-indexed backtracking weights";
    w.files = {"stlc_bespoke.gen"};
    w.features = {"height", "apps"};
    w.train.clamp = false;
    out.push_back(w);
  }
  out.push_back(derived("bst", "derived binary search tree generator", "derived/bst_types.gen", "Tree", 4,
                        {"derived/bst_valid.gen"}, "isBST", {"height"}));
  out.push_back(derived("rbt", "derived red-black tree generator", "derived/rbt_types.gen", "Tree", 4,
                        {"derived/rbt_valid.gen"}, "isRBT", {"height"}));
  out.push_back(derived("stlc", "derived lambda term generator", "derived/stlc_types.gen", "Expr", 4,
                        {"derived/stlc_typing.gen"}, "wellTyped", {"typeOfTerm", "appCount"}));
  // The clamp keeps the root Var choice at 0.1 or more, and a bare variable
  // is never well typed, so feature training here runs unclamped.
  out.back().train.clamp = false;
  out.back().train.lr = 1.0;
  out.back().train.epochs = 1000;
  return out;
}

std::string path_of(const std::string& f) { return (std::filesystem::path(workload_dir()) / f).string(); }

}  // namespace

const std::vector<Workload>& builtin_workloads() {
  static const std::vector<Workload> all = make_workloads();
  return all;
}

const Workload& find_workload(const std::string& name) {
  for (const auto& w : builtin_workloads())
    if (w.name == name) return w;
  throw std::invalid_argument("unknown workload: " + name);
}

std::string workload_generator_text(const Workload& w) {
  if (!w.derive) return surface::read_file(path_of(w.files.at(0)));
  surface::Program types = surface::parse_program(surface::read_file(path_of(w.files.at(0))), w.files.at(0));
  return derive_generator(types, *w.derive).text;
}

std::shared_ptr<const surface::Program> load_workload(const Workload& w) {
  auto p = std::make_shared<surface::Program>();
  surface::parse_program(workload_generator_text(w), w.derive ? w.name + ".derived.gen" : w.files.at(0), *p);
  for (std::size_t i = 1; i < w.files.size(); ++i) surface::load_program_file(path_of(w.files[i]), *p);
  return p;
}

}  // namespace gentune
