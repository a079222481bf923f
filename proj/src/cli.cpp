#include "listmix/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "listmix/assumption.hpp"
#include "listmix/generate.hpp"
#include "listmix/mixing.hpp"
#include "listmix/oracle.hpp"
#include "listmix/recursion.hpp"

namespace listmix {

std::vector<Vertex> parse_vertex_set(const std::string& text) {
  std::set<Vertex> out;
  std::istringstream in(text);
  std::string item;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw FormatError("bad vertex '" + s + "'");
    }
    if (used != s.size()) throw FormatError("bad vertex '" + s + "'");
    return v;
  };
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) continue;
    auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.insert(to_int(item));
    } else {
      int lo = to_int(item.substr(0, dash));
      int hi = to_int(item.substr(dash + 1));
      if (lo > hi) throw FormatError("empty range '" + item + "'");
      for (int v = lo; v <= hi; ++v) out.insert(v);
    }
  }
  return {out.begin(), out.end()};
}

namespace {

struct Common {
  std::string file;
  double alpha = 2.0;
  double beta = 10.0;
  int depth = -1;
  std::string leaf = "uniform";
  std::uint64_t seed = 1;
  int samples = 16;
  std::string out;
  Vertex vertex = 0;
  Color color = 0;
  Color j1 = 0;
  Color j2 = 0;
  Vertex f = -1;
  std::string cond;
  std::vector<std::string> conds;
  std::string cond1;
  std::string cond2;
  std::string psi;
  std::string lambda;
  std::string w;
  double free_probability = 0.2;
  bool verify_strip = false;
  std::string instance;
  // gen
  std::string family = "path";
  int n = 5;
  int m = 1;
  double edge_probability = 0.3;
  std::string policy = "uniform";
  int list_size = 3;
  int q = 3;
};

int verdict(bool passed) { return passed ? kExitOk : kExitFailed; }

Region region_of(const GraphListPair& pair, const std::string& text) {
  auto psi = parse_vertex_set(text);
  for (Vertex v : psi)
    if (!pair.contains(v)) throw std::out_of_range("psi vertex " + std::to_string(v) + " out of range");
  return Region(pair, psi);
}

void emit_csv(const Common& o, std::span<const DecaySample> samples, std::ostream& out) {
  if (o.out.empty()) {
    write_csv(out, samples);
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw FormatError("cannot write " + o.out);
  write_csv(file, samples);
}

void print_experiment(const Common& o, const GraphListPair& pair, const ExperimentResult& r, std::ostream& out,
                      std::ostream& err) {
  emit_csv(o, r.samples, out);
  err << "samples=" << r.samples.size() << "\nrejected=" << r.rejected << '\n';
  if (r.strip_checks > 0) err << "strip_checks=" << r.strip_checks << "\nstrip_mismatches=" << r.strip_mismatches << '\n';
  try {
    auto fit = fit_decay(r.samples);
    if (check_assumption(pair, o.alpha, o.beta).satisfied) fit.theory = theoretical_envelope(pair, o.alpha, o.beta);
    err << fit.summary();
  } catch (const FitError& e) {
    err << "fit=unavailable (" << e.what() << ")\n";
  }
}

int envelope_violations(const ExperimentResult& r) {
  int bad = 0;
  for (const auto& s : r.samples)
    if (!std::isnan(s.envelope) && !(s.epsilon <= s.envelope)) ++bad;
  return bad;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"List-coloring marginals, recursions, and spatial mixing experiments", "listmix"};
  app.require_subcommand(1);
  Common o;

  auto file_arg = [&](CLI::App* sub) { sub->add_option("file", o.file, "Graph file")->required(); };
  auto ab = [&](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "List-size slope");
    sub->add_option("--beta", o.beta, "List-size offset");
  };
  auto experiment_flags = [&](CLI::App* sub) {
    file_arg(sub);
    ab(sub);
    sub->add_option("--psi", o.psi, "Region vertices, e.g. 0-4,7")->required();
    sub->add_option("--vertex", o.vertex, "Vertex whose marginal is measured")->required();
    sub->add_option("--samples", o.samples, "Number of condition pairs");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--free-prob", o.free_probability, "Probability that an outside vertex is left free");
    sub->add_option("--instance", o.instance, "Instance id for the CSV");
    sub->add_option("--out", o.out, "CSV output file (default stdout)");
  };

  auto* check = app.add_subcommand("check", "Report whether the list-size assumption holds");
  file_arg(check);
  ab(check);

  auto* count = app.add_subcommand("count", "Exact number of list colorings");
  file_arg(count);
  count->add_option("--cond", o.cond, "Condition v=c,...");

  auto* marg = app.add_subcommand("marginal", "Marginal at a vertex (oracle, or recursion with --depth)");
  file_arg(marg);
  marg->add_option("--vertex", o.vertex)->required();
  marg->add_option("--color", o.color, "Single color (default: all)");
  marg->add_option("--cond", o.cond);
  marg->add_option("--depth", o.depth, "Recursion depth; omit for the exact oracle");
  marg->add_option("--leaf", o.leaf, "Value at depth 0: uniform|oracle")->check(CLI::IsMember({"uniform", "oracle"}));

  auto* ratio = app.add_subcommand("ratio", "Marginal ratio through the telescoping product");
  file_arg(ratio);
  ratio->add_option("--vertex", o.vertex)->required();
  ratio->add_option("--j1", o.j1)->required();
  ratio->add_option("--j2", o.j2)->required();
  ratio->add_option("--cond", o.cond);

  auto* wsm = app.add_subcommand("wsm", "Weak spatial mixing samples as CSV");
  experiment_flags(wsm);

  auto* ssm = app.add_subcommand("ssm", "Strong spatial mixing samples as CSV");
  experiment_flags(ssm);
  ssm->add_option("--w", o.w, "Disagreement set on the boundary")->required();
  ssm->add_flag("--verify-strip", o.verify_strip, "Check the boundary-stripping reduction on every sample");

  auto* contract = app.add_subcommand("contract", "Check one contraction step");
  file_arg(contract);
  ab(contract);
  contract->add_option("--vertex", o.vertex)->required();
  contract->add_option("--cond1", o.cond1);
  contract->add_option("--cond2", o.cond2);

  auto* bounds = app.add_subcommand("bounds", "Check the marginal bounds at a vertex");
  file_arg(bounds);
  ab(bounds);
  bounds->add_option("--vertex", o.vertex)->required();
  bounds->add_option("--cond", o.conds, "Condition (repeatable)");

  auto* tvscale = app.add_subcommand("tvscale", "Check TV over lambda against |lambda| * eps");
  file_arg(tvscale);
  tvscale->add_option("--psi", o.psi)->required();
  tvscale->add_option("--lambda", o.lambda)->required();
  tvscale->add_option("--cond1", o.cond1);
  tvscale->add_option("--cond2", o.cond2);

  auto* single = app.add_subcommand("single-point", "Check TV against 2 eps for a single boundary disagreement");
  file_arg(single);
  single->add_option("--psi", o.psi)->required();
  single->add_option("--lambda", o.lambda)->required();
  single->add_option("--cond", o.cond, "Common condition (f left free)");
  single->add_option("--f", o.f)->required();
  single->add_option("--j1", o.j1)->required();
  single->add_option("--j2", o.j2)->required();

  auto* envelope = app.add_subcommand("envelope", "Theoretical decay constants F, gamma, d0, B");
  file_arg(envelope);
  ab(envelope);

  auto* gen = app.add_subcommand("gen", "Generate an instance file");
  gen->add_option("--family", o.family, "path|cycle|complete-bipartite|random-tree|grid|random-triangle-free");
  gen->add_option("--n", o.n, "Vertex count, first side, or rows");
  gen->add_option("--m", o.m, "Second side or columns");
  gen->add_option("--p", o.edge_probability, "Edge proposal probability (random-triangle-free)");
  gen->add_option("--policy", o.policy, "uniform|assumption");
  gen->add_option("--list-size", o.list_size, "List size for the uniform policy");
  gen->add_option("--q", o.q, "Palette size");
  gen->add_option("--seed", o.seed);
  gen->add_option("--out", o.out, "Output file (default stdout)");
  ab(gen);

  std::vector<std::string> argv_store{"listmix"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    std::ostringstream buffer;
    buffer.precision(17);
    auto load = [&] { return read_graph_file(o.file); };
    int code = kExitOk;

    if (*check) {
      auto pair = load();
      auto r = check_assumption(pair, o.alpha, o.beta);
      buffer << r.summary();
      code = verdict(r.satisfied);
    } else if (*count) {
      auto pair = load();
      buffer << count_colorings(pair, parse_condition(o.cond)) << '\n';
    } else if (*marg) {
      auto pair = load();
      auto c = parse_condition(o.cond);
      RecursionOptions ro;
      ro.depth = o.depth;
      ro.leaf = o.leaf == "oracle" ? LeafRule::kOracle : LeafRule::kUniform;
      if (o.depth >= 0) buffer << "leaf=" << o.leaf << '\n';
      MarginalVector p = o.depth < 0 ? marginal_vector(pair, c, o.vertex) : recursive_marginal_vector(pair, c, o.vertex, ro);
      for (std::size_t k = 0; k < p.size(); ++k)
        if (o.color == 0 || p.colors[k] == o.color) buffer << p.colors[k] << '=' << format_double(p.probabilities[k]) << '\n';
    } else if (*ratio) {
      auto pair = load();
      auto c = parse_condition(o.cond);
      double recursive = ratio_exact(pair, o.vertex, o.j1, o.j2, c);
      auto exact = exact_marginals(pair, c, o.vertex);
      buffer << "ratio=" << format_double(recursive) << '\n';
      if (exact.count(o.j2) != 0)
        buffer << "oracle_ratio=" << format_double(to_double(Rational(exact.count(o.j1), exact.count(o.j2)))) << '\n';
    } else if (*wsm || *ssm) {
      auto pair = load();
      auto psi = region_of(pair, o.psi);
      ExperimentOptions opt;
      opt.samples = o.samples;
      opt.seed = o.seed;
      opt.free_probability = o.free_probability;
      opt.alpha = o.alpha;
      opt.beta = o.beta;
      opt.instance = o.instance.empty() ? o.file : o.instance;
      opt.verify_strip = o.verify_strip;
      ExperimentResult r;
      if (*wsm) {
        r = wsm_experiment(pair, psi, o.vertex, opt);
      } else {
        auto w = parse_vertex_set(o.w);
        r = ssm_experiment(pair, psi, o.vertex, w, opt);
      }
      print_experiment(o, pair, r, buffer, err);
      int bad = envelope_violations(r);
      if (bad > 0) err << "envelope_violations=" << bad << '\n';
      code = verdict(bad == 0 && r.strip_mismatches == 0);
    } else if (*contract) {
      auto pair = load();
      auto r = contraction_check(pair, o.vertex, parse_condition(o.cond1), parse_condition(o.cond2), o.alpha, o.beta);
      buffer << r.summary();
      code = verdict(r.passed());
    } else if (*bounds) {
      auto pair = load();
      std::vector<BoundaryCondition> cs;
      for (const auto& s : o.conds) cs.push_back(parse_condition(s));
      if (cs.empty()) cs.emplace_back();
      auto r = bounds_check(pair, o.vertex, cs, o.alpha, o.beta);
      buffer << r.summary();
      code = verdict(r.passed());
    } else if (*tvscale) {
      auto pair = load();
      auto r = tv_scaling_check(pair, region_of(pair, o.psi), parse_vertex_set(o.lambda), parse_condition(o.cond1),
                                parse_condition(o.cond2));
      buffer << r.summary();
      code = verdict(r.passed());
    } else if (*single) {
      auto pair = load();
      auto r = single_point_corollary_check(pair, region_of(pair, o.psi), parse_vertex_set(o.lambda),
                                            parse_condition(o.cond), o.f, o.j1, o.j2);
      buffer << r.summary();
      code = verdict(r.passed());
    } else if (*envelope) {
      auto pair = load();
      buffer << theoretical_envelope(pair, o.alpha, o.beta).summary();
    } else if (*gen) {
      GeneratorSpec spec;
      spec.family = parse_family(o.family);
      spec.n = o.n;
      spec.m = o.m;
      spec.edge_probability = o.edge_probability;
      spec.seed = o.seed;
      if (o.policy == "uniform") spec.lists = ListPolicy::uniform(o.list_size, o.q);
      else if (o.policy == "assumption") spec.lists = ListPolicy::assumption(o.alpha, o.beta, o.q);
      else throw ConfigError("unknown list policy '" + o.policy + "'");
      auto pair = generate(spec);
      if (o.out.empty()) {
        write_graph(buffer, pair);
      } else {
        std::ofstream file(o.out);
        if (!file) throw FormatError("cannot write " + o.out);
        write_graph(file, pair);
      }
    }
    out << buffer.str();
    return code;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace listmix
