#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "mixext/atlas.hpp"
#include "mixext/equilibrium.hpp"
#include "mixext/game.hpp"
#include "mixext/genericity.hpp"
#include "mixext/multilinear.hpp"

namespace mixext::cli {
namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  bool json = false;
  bool exact = false;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  double rank_tol = 1e-8;
};

json meta(const std::string& command, const Flags& flags, const std::string& mode) {
  return json{{"command", command},     {"mode", mode},          {"seed", flags.seed},
              {"tol", flags.tol},       {"rank_tol", flags.rank_tol}};
}

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}
json number(const Rational& x) { return x.get_str(); }

std::string text(double x) { return format_scalar(x); }
std::string text(const Rational& x) { return x.get_str(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

FiniteGame load_game(const std::string& path, const Flags& flags) {
  const std::string content = read_file(path);
  FiniteGame game = parse_game(content, flags.exact ? NumericMode::kRational : NumericMode::kFloat);
  if (flags.exact && game.num_players() != 2) {
    throw UsageError("--exact is only valid for two-player games");
  }
  return game;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::size_t parse_size(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.empty() || s.front() == '-') throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError("malformed " + context + " '" + s + "'");
  }
}

std::size_t parse_player(const std::string& s, std::size_t num_players) {
  const std::size_t p = parse_size(s, "player index");
  if (p == 0 || p > num_players) {
    throw UsageError("player " + s + " out of range 1.." + std::to_string(num_players));
  }
  return p - 1;
}

// --t i:j[,j...] (j may be inf) and --r i:j-k[,j-k...], players from 1.
GoodFamily parse_family(const std::vector<std::string>& t_specs,
                        const std::vector<std::string>& r_specs, std::size_t num_players) {
  GoodFamily family = GoodFamily::empty(num_players);
  for (const auto& spec : t_specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("malformed --t spec '" + spec + "'");
    const std::size_t player = parse_player(spec.substr(0, colon), num_players);
    for (const auto& j : split(spec.substr(colon + 1), ',')) {
      if (j == "inf") {
        family.T[player].push_back(std::nullopt);
      } else {
        family.T[player].push_back(parse_size(j, "strategy index"));
      }
    }
  }
  for (const auto& spec : r_specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("malformed --r spec '" + spec + "'");
    const std::size_t player = parse_player(spec.substr(0, colon), num_players);
    for (const auto& pair : split(spec.substr(colon + 1), ',')) {
      const auto dash = pair.find('-');
      if (dash == std::string::npos) throw UsageError("malformed edge '" + pair + "'");
      std::size_t j = parse_size(pair.substr(0, dash), "strategy index");
      std::size_t k = parse_size(pair.substr(dash + 1), "strategy index");
      if (j == k) throw UsageError("edge '" + pair + "' is a loop");
      if (j > k) std::swap(j, k);
      family.R[player].push_back({j, k});
    }
  }
  return family;
}

std::size_t family_players(const std::vector<std::string>& t_specs,
                           const std::vector<std::string>& r_specs) {
  std::size_t m = 0;
  for (const auto* specs : {&t_specs, &r_specs}) {
    for (const auto& spec : *specs) {
      const auto colon = spec.find(':');
      if (colon == std::string::npos) throw UsageError("malformed family spec '" + spec + "'");
      m = std::max(m, parse_size(spec.substr(0, colon), "player index"));
    }
  }
  return m;
}

ChartId parse_chart(const std::string& spec, const std::vector<std::size_t>& counts) {
  if (spec.empty()) return standard_chart(counts.size());
  ChartId chart;
  for (const auto& part : split(spec, ',')) chart.l.push_back(parse_size(part, "chart index"));
  try {
    validate_chart(chart, counts);
  } catch (const DimensionError& e) {
    throw UsageError(std::string("bad chart: ") + e.what());
  }
  return chart;
}

std::string chart_name(const ChartId& chart) {
  std::string s;
  for (std::size_t i = 0; i < chart.l.size(); ++i) s += (i ? "," : "") + std::to_string(chart.l[i]);
  return s;
}

std::vector<std::vector<double>> parse_point(const std::string& spec,
                                             const std::vector<std::size_t>& counts) {
  std::vector<std::vector<double>> weights;
  for (const auto& player : split(spec, ';')) {
    std::vector<double> w;
    for (const auto& x : split(player, ',')) {
      try {
        w.push_back(parse_double(x));
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("bad point: ") + e.what());
      }
    }
    weights.push_back(std::move(w));
  }
  if (weights.size() != counts.size()) throw UsageError("point needs one weight list per player");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (weights[i].size() != counts[i]) {
      throw UsageError("player " + std::to_string(i + 1) + " needs " + std::to_string(counts[i]) +
                       " weights");
    }
  }
  return weights;
}

std::vector<std::vector<double>> point_from_report(const std::string& path, std::size_t index) {
  json report;
  try {
    report = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw UsageError("cannot read solve report: " + std::string(e.what()));
  }
  const auto& equilibria = report.at("results").at("equilibria");
  if (index >= equilibria.size()) {
    throw UsageError("solve report has " + std::to_string(equilibria.size()) + " equilibria");
  }
  std::vector<std::vector<double>> weights;
  for (const auto& player : equilibria[index].at("point")) {
    std::vector<double> w;
    for (const auto& x : player) {
      w.push_back(x.is_string() ? parse_double(x.get<std::string>()) : x.get<double>());
    }
    weights.push_back(std::move(w));
  }
  return weights;
}

template <class Scalar>
json weights_json(const MixedProfile<Scalar>& profile) {
  json out = json::array();
  for (const auto& w : profile.weights) {
    json row = json::array();
    for (const auto& x : w) row.push_back(number(x));
    out.push_back(row);
  }
  return out;
}

json support_json(const SupportProfile& support) {
  json out = json::array();
  for (const auto& s : support.supports) out.push_back(s);
  return out;
}

template <class Scalar>
std::string weights_text(const std::vector<Scalar>& w) {
  std::string s;
  for (std::size_t j = 0; j < w.size(); ++j) s += (j ? " " : "") + text(w[j]);
  return s;
}

// ---- solve ----------------------------------------------------------------

int cmd_solve(const std::string& path, const Flags& flags, std::ostream& out) {
  const FiniteGame game = load_game(path, flags);
  EnumerationOptions options;
  options.best_reply_tol = flags.tol;
  options.membership_tol = flags.tol;
  options.solver.rank_tol = flags.rank_tol;
  options.solver.seed = flags.seed;
  options.exact = flags.exact;
  const NashResult result = enumerate_nash(game, options);

  const bool non_regular = std::any_of(result.equilibria.begin(), result.equilibria.end(),
                                       [](const auto& c) { return !c.jacobian.regular; });
  std::vector<std::string> warnings = result.warnings;
  for (std::size_t k = 0; k < result.equilibria.size(); ++k) {
    if (!result.equilibria[k].jacobian.regular) {
      warnings.push_back("equilibrium " + std::to_string(k + 1) + " at " +
                         format_support(result.equilibria[k].support) +
                         " has a singular Jacobian (degeneracy witnessed)");
    }
  }
  const bool degenerate = result.continuum || !result.warnings.empty() || non_regular;

  if (flags.json) {
    json eqs = json::array();
    for (const auto& c : result.equilibria) {
      json e;
      e["support"] = support_json(c.support);
      if (c.exact_point) {
        e["point"] = weights_json(*c.exact_point);
        json payoffs = json::array();
        for (const auto& p : expected_payoffs(game, *c.exact_point)) payoffs.push_back(number(p));
        e["payoffs"] = payoffs;
      } else {
        e["point"] = weights_json(c.point);
        e["payoffs"] = c.payoffs;
      }
      e["equality_residual"] = c.equality_residual;
      e["inequality_margin"] = c.inequality_margin ? json(*c.inequality_margin) : json(nullptr);
      e["boundary_degenerate"] = c.boundary_degenerate;
      e["jacobian"] = {{"regular", c.jacobian.regular},
                       {"rank", c.jacobian.rank},
                       {"size", c.jacobian.size},
                       {"smallest_singular_value", number(c.jacobian.smallest_singular_value)}};
      e["exact"] = c.exact;
      eqs.push_back(e);
    }
    json report{{"meta", meta("solve", flags, result.exact ? "rational" : "float")},
                {"results",
                 {{"equilibria", eqs},
                  {"count", result.equilibria.size()},
                  {"continuum", result.continuum},
                  {"exact", result.exact},
                  {"degeneracy_witnessed", degenerate}}},
                {"warnings", warnings}};
    report["meta"]["input"] = path;
    out << report.dump(2) << '\n';
  } else {
    out << "game: " << format_shape(game.strategy_counts()) << " ("
        << (result.exact ? "exact" : "float") << ")\n";
    if (result.continuum) {
      out << "non-generic: continuum detected\n";
    } else {
      out << "equilibria: " << result.equilibria.size() << '\n';
      for (std::size_t k = 0; k < result.equilibria.size(); ++k) {
        const auto& c = result.equilibria[k];
        out << '[' << k + 1 << "] support " << format_support(c.support) << '\n';
        for (std::size_t i = 0; i < game.num_players(); ++i) {
          out << "    player " << i + 1 << ": ";
          if (c.exact_point) {
            out << weights_text(c.exact_point->weights[i]) << "  payoff "
                << text(expected_payoffs(game, *c.exact_point)[i]);
          } else {
            out << weights_text(c.point.weights[i]) << "  payoff " << text(c.payoffs[i]);
          }
          out << '\n';
        }
        out << "    residual " << text(c.equality_residual) << ", margin "
            << (c.inequality_margin ? text(*c.inequality_margin) : std::string("none"))
            << ", jacobian " << (c.jacobian.regular ? "regular" : "singular")
            << " (smallest singular value " << text(c.jacobian.smallest_singular_value) << ")\n";
      }
    }
    for (const auto& w : warnings) out << "warning: " << w << '\n';
  }
  return degenerate ? kExitDegenerate : kExitOk;
}

// ---- lambda ---------------------------------------------------------------

std::string monomial_name(const std::vector<std::size_t>& blocks,
                          const std::vector<std::size_t>& slots) {
  std::string s;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    if (slots[a] == 0) continue;
    if (!s.empty()) s += '*';
    s += "g" + std::to_string(blocks[a] + 1) + "_" + std::to_string(slots[a]);
  }
  return s.empty() ? "const" : s;
}

template <class Scalar>
json terms_json(const MultilinearForm<Scalar>& form) {
  json terms = json::array();
  std::vector<std::size_t> slots(form.arity(), 0);
  for (std::size_t flat = 0; flat < form.coeffs.size(); ++flat) {
    terms.push_back({{"monomial", monomial_name(form.blocks, slots)},
                     {"coeff", number(form.coeffs[flat])}});
    next_index(slots, form.coeffs.shape());
  }
  return terms;
}

template <class Scalar>
std::string terms_text(const MultilinearForm<Scalar>& form) {
  std::string s;
  std::vector<std::size_t> slots(form.arity(), 0);
  for (std::size_t flat = 0; flat < form.coeffs.size(); ++flat) {
    s += (flat ? ", " : "") + monomial_name(form.blocks, slots) + " " + text(form.coeffs[flat]);
    next_index(slots, form.coeffs.shape());
  }
  return s;
}

template <class Scalar>
void render_lambda(const FiniteGame& game, std::size_t player, const Flags& flags,
                   const std::string& path, std::ostream& out) {
  const auto d = lambda_decomposition<Scalar>(game, player);
  if (flags.json) {
    json lambdas = json::array();
    for (std::size_t j = 1; j < d.lambdas.size(); ++j) {
      lambdas.push_back({{"j", j}, {"terms", terms_json(d.lambdas[j])}});
    }
    json report{{"meta", meta("lambda", flags, game.exact() ? "rational" : "float")},
                {"results",
                 {{"player", player + 1}, {"kappa", terms_json(d.kappa)}, {"lambdas", lambdas}}},
                {"warnings", json::array()}};
    report["meta"]["input"] = path;
    out << report.dump(2) << '\n';
    return;
  }
  out << "player " << player + 1 << " (monomials in the other players' weights g<k>_<j>)\n";
  out << "kappa: " << terms_text(d.kappa) << '\n';
  for (std::size_t j = 1; j < d.lambdas.size(); ++j) {
    out << "lambda_" << j << ": " << terms_text(d.lambdas[j]) << '\n';
  }
}

int cmd_lambda(const std::string& path, std::size_t player_one_based, const Flags& flags,
               std::ostream& out) {
  const FiniteGame game = load_game(path, flags);
  if (player_one_based == 0 || player_one_based > game.num_players()) {
    throw UsageError("player " + std::to_string(player_one_based) + " out of range 1.." +
                     std::to_string(game.num_players()));
  }
  if (game.exact()) {
    render_lambda<Rational>(game, player_one_based - 1, flags, path, out);
  } else {
    render_lambda<double>(game, player_one_based - 1, flags, path, out);
  }
  return kExitOk;
}

// ---- goodcheck ------------------------------------------------------------

int cmd_goodcheck(const std::vector<std::string>& t_specs, const std::vector<std::string>& r_specs,
                  const std::string& shape, const Flags& flags, std::ostream& out) {
  std::size_t m = family_players(t_specs, r_specs);
  std::vector<std::size_t> counts;
  if (!shape.empty()) {
    counts = parse_shape(shape);
    if (m > counts.size()) throw UsageError("family names a player beyond the shape");
    m = counts.size();
  }
  const GoodFamily family = parse_family(t_specs, r_specs, std::max<std::size_t>(m, 1));
  if (!counts.empty()) {
    try {
      validate_family(family, counts);
    } catch (const DimensionError& e) {
      throw UsageError(e.what());
    }
  }
  std::optional<std::pair<std::size_t, std::vector<std::size_t>>> witness;
  for (std::size_t i = 0; i < family.R.size() && !witness; ++i) {
    if (auto cycle = find_cycle(family.R[i])) witness = std::make_pair(i, *cycle);
  }
  if (flags.json) {
    json results{{"good", !witness}};
    results["cycle"] = witness ? json{{"player", witness->first + 1}, {"vertices", witness->second}}
                               : json(nullptr);
    json report{{"meta", meta("goodcheck", flags, "combinatorial")},
                {"results", results},
                {"warnings", json::array()}};
    out << report.dump(2) << '\n';
  } else if (!witness) {
    out << "good\n";
  } else {
    out << "not good: player " << witness->first + 1 << " has cycle (";
    for (std::size_t k = 0; k < witness->second.size(); ++k) {
      out << (k ? "," : "") << witness->second[k];
    }
    out << ")\n";
  }
  return kExitOk;
}

// ---- sample ---------------------------------------------------------------

int cmd_sample(const std::string& shape, std::size_t count, const std::string& dist,
               const Flags& flags, std::ostream& out) {
  std::vector<std::size_t> counts;
  try {
    counts = parse_shape(shape);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (count == 0) throw UsageError("--count must be at least 1");
  Distribution distribution;
  if (dist == "uniform") {
    distribution = Distribution::kUniform;
  } else if (dist == "normal") {
    distribution = Distribution::kNormal;
  } else {
    throw UsageError("--dist must be 'uniform' or 'normal'");
  }
  EnumerationOptions options;
  options.best_reply_tol = flags.tol;
  options.membership_tol = flags.tol;
  options.solver.rank_tol = flags.rank_tol;
  options.solver.seed = flags.seed;

  json games = json::array();
  std::size_t odd = 0, witnessed = 0, warned = 0;
  std::vector<std::string> warnings;
  std::ostringstream rows;
  for (std::size_t g = 0; g < count; ++g) {
    const std::uint64_t seed = flags.seed + g;
    const FiniteGame game = random_game(counts, seed, distribution);
    const NashResult result = enumerate_nash(game, options);
    const std::size_t n = result.equilibria.size();
    const bool is_odd = !result.continuum && n % 2 == 1;
    const std::size_t regular = static_cast<std::size_t>(
        std::count_if(result.equilibria.begin(), result.equilibria.end(),
                      [](const auto& c) { return c.jacobian.regular; }));
    const bool degenerate = result.continuum || !result.warnings.empty() || regular != n;
    odd += is_odd;
    witnessed += degenerate;
    warned += !result.warnings.empty();
    for (const auto& w : result.warnings) warnings.push_back("seed " + std::to_string(seed) + ": " + w);
    if (!is_odd) warnings.push_back("seed " + std::to_string(seed) + ": even or infinite count");
    games.push_back({{"seed", seed},
                     {"equilibria", n},
                     {"odd", is_odd},
                     {"regular", regular},
                     {"warned", !result.warnings.empty()},
                     {"continuum", result.continuum}});
    rows << "seed " << seed << ": " << n << " equilibria, " << (is_odd ? "odd" : "EVEN") << ", "
         << regular << '/' << n << " regular" << (result.warnings.empty() ? "" : ", warned") << '\n';
  }
  const double oddness = static_cast<double>(odd) / static_cast<double>(count);
  const double witness_rate = static_cast<double>(witnessed) / static_cast<double>(count);
  if (flags.json) {
    json report{{"meta", meta("sample", flags, "float")},
                {"results",
                 {{"shape", shape},
                  {"distribution", dist},
                  {"count", count},
                  {"games", games},
                  {"oddness_rate", oddness},
                  {"degeneracy_witness_rate", witness_rate},
                  {"warned_games", warned}}},
                {"warnings", warnings}};
    out << report.dump(2) << '\n';
  } else {
    out << rows.str();
    out << "oddness rate " << oddness << ", degeneracy-witness rate " << witness_rate << '\n';
  }
  return kExitOk;
}

// ---- certify --------------------------------------------------------------

int cmd_certify(const std::string& path, const std::string& point_spec,
                const std::string& from_json, std::size_t index,
                const std::vector<std::string>& t_specs, const std::vector<std::string>& r_specs,
                const std::string& chart_spec, const Flags& flags, std::ostream& out) {
  Flags float_flags = flags;
  float_flags.exact = false;
  const FiniteGame game = load_game(path, float_flags);
  const auto& counts = game.strategy_counts();
  std::vector<std::vector<double>> weights;
  if (!from_json.empty()) {
    weights = point_from_report(from_json, index);
  } else if (!point_spec.empty()) {
    weights = parse_point(point_spec, counts);
  } else {
    throw UsageError("certify needs --point or --from-json");
  }
  if (weights.size() != counts.size()) throw UsageError("point has the wrong player count");

  GoodFamily family;
  if (t_specs.empty() && r_specs.empty()) {
    family = equilibrium_family(support_of(MixedProfile<double>{weights}), counts);
  } else {
    family = parse_family(t_specs, r_specs, counts.size());
  }
  try {
    validate_family(family, counts);
  } catch (const DimensionError& e) {
    throw UsageError(e.what());
  }
  if (!is_good(family)) throw UsageError("family is not good (some R^i contains a cycle)");
  const ChartId chart = parse_chart(chart_spec, counts);
  for (const auto& h : members(family)) {
    if (chart_excludes(chart, h)) {
      throw UsageError(to_string(h) + " lies outside chart " + chart_name(chart) +
                       ": a chart with l_i = j excludes the hyperplane with tilde index j "
                       "(C:i:inf for l_i = 0, C:i:j for l_i = j)");
    }
  }
  ChartPoint point;
  try {
    point = chart_point_from_weights(weights, chart);
  } catch (const DivisionByZero& e) {
    throw UsageError(std::string("point is not in chart ") + chart_name(chart) + ": " + e.what());
  }
  const TransversalityReport report =
      transversal_at(game, family, point, TransversalityOptions{flags.tol, flags.rank_tol});
  const std::size_t total = members(family).size();
  const bool square_regular = report.transversal && report.active.size() == game.dimension();

  if (flags.json) {
    json active = json::array();
    for (const auto& h : report.active) active.push_back(to_string(h));
    json jac = json::array();
    for (Eigen::Index r = 0; r < report.jacobian.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < report.jacobian.cols(); ++c) row.push_back(report.jacobian(r, c));
      jac.push_back(row);
    }
    json coords = json::array();
    for (const auto& x : report.point.coords) coords.push_back(std::vector<double>(x.begin(), x.end()));
    json results{{"chart", report.chart.l},
                 {"coordinates", coords},
                 {"family_size", total},
                 {"active", active},
                 {"jacobian", jac},
                 {"rank", report.rank},
                 {"smallest_singular_value", number(report.smallest_singular_value)},
                 {"verdict", report.transversal ? "transversal" : "degenerate"},
                 {"regular", square_regular}};
    json out_report{{"meta", meta("certify", flags, "float")},
                    {"results", results},
                    {"warnings", json::array()}};
    out_report["meta"]["input"] = path;
    out << out_report.dump(2) << '\n';
  } else {
    out << "chart " << chart_name(report.chart) << ", " << report.active.size() << " of " << total
        << " hypersurfaces active\n";
    if (report.active.empty()) out << "no family member passes through the point\n";
    for (Eigen::Index r = 0; r < report.jacobian.rows(); ++r) {
      out << "  " << std::left << std::setw(10) << to_string(report.active[static_cast<std::size_t>(r)])
          << " [";
      for (Eigen::Index c = 0; c < report.jacobian.cols(); ++c) {
        out << (c ? " " : "") << text(report.jacobian(r, c));
      }
      out << "]\n";
    }
    out << "rank " << report.rank << ", smallest singular value "
        << text(report.smallest_singular_value) << '\n';
    out << "verdict: " << (report.transversal ? "transversal" : "degenerate")
        << (square_regular ? " (regular)" : "") << '\n';
  }
  return report.transversal ? kExitOk : kExitDegenerate;
}

// ---- charts ---------------------------------------------------------------

int cmd_charts(const std::string& shape, const Flags& flags, std::ostream& out) {
  std::vector<std::size_t> counts;
  try {
    counts = parse_shape(shape);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto charts = all_charts(counts);
  if (flags.json) {
    json list = json::array();
    for (const auto& c : charts) {
      json complement = json::array();
      for (const auto& h : chart_complement(c)) complement.push_back(to_string(h));
      list.push_back({{"chart", c.l}, {"complement", complement}});
    }
    json report{{"meta", meta("charts", flags, "combinatorial")},
                {"results", {{"shape", shape}, {"count", charts.size()}, {"charts", list}}},
                {"warnings", json::array()}};
    out << report.dump(2) << '\n';
    return kExitOk;
  }
  out << charts.size() << " charts, dimension " << [&] {
    std::size_t d = 0;
    for (auto c : counts) d += c - 1;
    return d;
  }() << '\n';
  for (const auto& c : charts) {
    out << "chart " << chart_name(c) << "  complement:";
    for (const auto& h : chart_complement(c)) out << ' ' << to_string(h);
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria and genericity certificates for finite normal-form games", "mixext"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_flag("--json", flags.json, "Machine-readable report");
  app.add_flag("--exact", flags.exact, "Exact rational arithmetic (two-player games)");
  app.add_option("--seed", flags.seed, "Random seed");
  app.add_option("--tol", flags.tol, "Membership and best-reply tolerance");
  app.add_option("--rank-tol", flags.rank_tol, "Relative singular-value threshold");

  std::string file, shape, point, from_json, chart, dist = "uniform";
  std::size_t player = 1, count = 1, index = 0;
  std::vector<std::string> t_specs, r_specs;

  auto* solve = app.add_subcommand("solve", "Enumerate all Nash equilibria");
  solve->add_option("file", file, "Game file")->required();

  auto* lambda = app.add_subcommand("lambda", "Print kappa and lambda coefficients of a player");
  lambda->add_option("file", file, "Game file")->required();
  lambda->add_option("--player,-p", player, "Player (from 1)");

  auto* goodcheck = app.add_subcommand("goodcheck", "Check the forest condition of a family");
  goodcheck->add_option("--t", t_specs, "Coordinate hyperplanes i:j[,j...]");
  goodcheck->add_option("--r", r_specs, "Payoff-difference edges i:j-k[,j-k...]");
  goodcheck->add_option("--shape", shape, "Optional game shape for range checks");

  auto* sample = app.add_subcommand("sample", "Statistics over seeded random games");
  sample->add_option("shape", shape, "Shape such as 2x2x2")->required();
  sample->add_option("--count", count, "Number of games");
  sample->add_option("--dist", dist, "uniform or normal");

  auto* certify = app.add_subcommand("certify", "Transversality report at a point");
  certify->add_option("file", file, "Game file")->required();
  certify->add_option("--point", point, "Weights per player, e.g. 1/2,1/2;1/2,1/2");
  certify->add_option("--from-json", from_json, "Read the point from a solve --json report");
  certify->add_option("--index", index, "Equilibrium index in the report (from 0)");
  certify->add_option("--t", t_specs, "Coordinate hyperplanes i:j[,j...]");
  certify->add_option("--r", r_specs, "Payoff-difference edges i:j-k[,j-k...]");
  certify->add_option("--chart", chart, "Chart l1,l2,...");

  auto* charts = app.add_subcommand("charts", "List the affine charts of a shape");
  charts->add_option("shape", shape, "Shape such as 2x3")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(file, flags, out);
    if (*lambda) return cmd_lambda(file, player, flags, out);
    if (*goodcheck) return cmd_goodcheck(t_specs, r_specs, shape, flags, out);
    if (*sample) return cmd_sample(shape, count, dist, flags, out);
    if (*certify) {
      return cmd_certify(file, point, from_json, index, t_specs, r_specs, chart, flags, out);
    }
    if (*charts) return cmd_charts(shape, flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mixext::cli
