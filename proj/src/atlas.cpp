#include "mixext/atlas.hpp"

#include <charconv>
#include <cmath>

namespace mixext {

ChartId standard_chart(std::size_t num_players) {
  return ChartId{std::vector<std::size_t>(num_players, 0)};
}

std::vector<ChartId> all_charts(const std::vector<std::size_t>& strategy_counts) {
  std::vector<ChartId> charts;
  std::vector<std::size_t> index(strategy_counts.size(), 0);
  do {
    charts.push_back(ChartId{index});
  } while (next_index(index, strategy_counts));
  return charts;
}

void validate_chart(const ChartId& chart, const std::vector<std::size_t>& strategy_counts) {
  if (chart.l.size() != strategy_counts.size()) {
    throw DimensionError("chart needs one index per player");
  }
  for (std::size_t i = 0; i < chart.l.size(); ++i) {
    if (chart.l[i] >= strategy_counts[i]) {
      throw DimensionError("chart index for player " + std::to_string(i + 1) + " out of range");
    }
  }
}

std::vector<Eigen::VectorXd> lift(const ChartPoint& point) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(point.coords.size());
  for (std::size_t i = 0; i < point.coords.size(); ++i) {
    const auto& x = point.coords[i];
    const Eigen::Index li = static_cast<Eigen::Index>(point.chart.l.at(i));
    Eigen::VectorXd v(x.size() + 1);
    v.head(li) = x.head(li);
    v[li] = 1.0;
    v.tail(x.size() - li) = x.tail(x.size() - li);
    out.push_back(std::move(v));
  }
  return out;
}

ChartPoint chart_read(const std::vector<Eigen::VectorXd>& tilde, const ChartId& chart) {
  if (tilde.size() != chart.l.size()) throw DimensionError("chart/point player mismatch");
  ChartPoint out{chart, {}};
  for (std::size_t i = 0; i < tilde.size(); ++i) {
    const Eigen::Index li = static_cast<Eigen::Index>(chart.l[i]);
    const double pivot = tilde[i][li];
    if (pivot == 0.0) {
      throw DivisionByZero("point lies on the complement hyperplane of player " +
                           std::to_string(i + 1) + " for chart index " +
                           std::to_string(chart.l[i]));
    }
    const Eigen::Index n = tilde[i].size() - 1;
    Eigen::VectorXd x(n);
    x.head(li) = tilde[i].head(li) / pivot;
    x.tail(n - li) = tilde[i].tail(n - li) / pivot;
    out.coords.push_back(std::move(x));
  }
  return out;
}

ChartPoint transition(const ChartPoint& point, const ChartId& target) {
  if (point.chart == target) return point;
  return chart_read(lift(point), target);
}

ChartPoint chart_point_from_weights(const std::vector<std::vector<double>>& weights,
                                    const ChartId& chart) {
  std::vector<Eigen::VectorXd> tilde;
  for (const auto& w : weights) {
    auto t = tilde_coordinates<double>(w);
    tilde.push_back(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size())));
  }
  return chart_read(tilde, chart);
}

Eigen::VectorXd flatten(const ChartPoint& point) {
  Eigen::Index total = 0;
  for (const auto& x : point.coords) total += x.size();
  Eigen::VectorXd flat(total);
  Eigen::Index offset = 0;
  for (const auto& x : point.coords) {
    flat.segment(offset, x.size()) = x;
    offset += x.size();
  }
  return flat;
}

ChartPoint unflatten(const Eigen::VectorXd& flat, const ChartId& chart,
                     const std::vector<std::size_t>& strategy_counts) {
  ChartPoint out{chart, {}};
  Eigen::Index offset = 0;
  for (auto c : strategy_counts) {
    const Eigen::Index n = static_cast<Eigen::Index>(c) - 1;
    out.coords.push_back(flat.segment(offset, n));
    offset += n;
  }
  if (offset != flat.size()) throw DimensionError("flat chart point has wrong length");
  return out;
}

std::string to_string(const HypersurfaceId& h) {
  if (const auto* c = std::get_if<CoordinateHyperplane>(&h)) {
    return "C:" + std::to_string(c->player + 1) + ":" +
           (c->strategy ? std::to_string(*c->strategy) : std::string("inf"));
  }
  const auto& d = std::get<PayoffDifference>(h);
  return "D:" + std::to_string(d.player + 1) + ":" + std::to_string(d.first) + ":" +
         std::to_string(d.second);
}

namespace {

std::size_t parse_index(std::string_view s, std::string_view whole) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed hypersurface '" + std::string(whole) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    parts.push_back(s.substr(start, p == std::string_view::npos ? s.npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return parts;
}

}  // namespace

HypersurfaceId parse_hypersurface(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "C") {
    const std::size_t player = parse_index(parts[1], text);
    if (player == 0) throw std::invalid_argument("players are numbered from 1");
    if (parts[2] == "inf") return CoordinateHyperplane{player - 1, std::nullopt};
    return CoordinateHyperplane{player - 1, parse_index(parts[2], text)};
  }
  if (parts.size() == 4 && parts[0] == "D") {
    const std::size_t player = parse_index(parts[1], text);
    if (player == 0) throw std::invalid_argument("players are numbered from 1");
    return PayoffDifference{player - 1, parse_index(parts[2], text), parse_index(parts[3], text)};
  }
  throw std::invalid_argument("malformed hypersurface '" + std::string(text) + "'");
}

void validate_hypersurface(const HypersurfaceId& h,
                           const std::vector<std::size_t>& strategy_counts) {
  if (const auto* c = std::get_if<CoordinateHyperplane>(&h)) {
    if (c->player >= strategy_counts.size()) throw DimensionError("player out of range in " + to_string(h));
    if (c->strategy && *c->strategy >= strategy_counts[c->player]) {
      throw DimensionError("strategy out of range in " + to_string(h));
    }
    return;
  }
  const auto& d = std::get<PayoffDifference>(h);
  if (d.player >= strategy_counts.size()) throw DimensionError("player out of range in " + to_string(h));
  if (d.first >= d.second || d.second >= strategy_counts[d.player]) {
    throw DimensionError("payoff difference needs j < k within range: " + to_string(h));
  }
}

std::optional<std::size_t> tilde_index(const CoordinateHyperplane& h) {
  if (!h.strategy) return 0;
  if (*h.strategy == 0) return std::nullopt;
  return h.strategy;
}

bool chart_excludes(const ChartId& chart, const HypersurfaceId& h) {
  const auto* c = std::get_if<CoordinateHyperplane>(&h);
  if (!c) return false;
  const auto t = tilde_index(*c);
  return t && *t == chart.l.at(c->player);
}

std::vector<HypersurfaceId> chart_complement(const ChartId& chart) {
  std::vector<HypersurfaceId> out;
  for (std::size_t i = 0; i < chart.l.size(); ++i) {
    if (chart.l[i] == 0) {
      out.emplace_back(CoordinateHyperplane{i, std::nullopt});
    } else {
      out.emplace_back(CoordinateHyperplane{i, chart.l[i]});
    }
  }
  return out;
}

DefiningMap::DefiningMap(HypersurfaceId surface, ChartId chart, MultilinearForm<double> form,
                         std::vector<std::size_t> strategy_counts)
    : surface_(std::move(surface)),
      chart_(std::move(chart)),
      form_(std::move(form)),
      counts_(std::move(strategy_counts)),
      scale_(max_abs_coeff(form_)) {}

namespace {

BlockPoint<double> form_point(const MultilinearForm<double>& form,
                              const std::vector<Eigen::VectorXd>& tilde) {
  BlockPoint<double> out;
  for (auto k : form.blocks) out.emplace_back(tilde[k].data(), tilde[k].data() + tilde[k].size());
  return out;
}

}  // namespace

double DefiningMap::value(const ChartPoint& point) const {
  if (point.chart != chart_) throw DimensionError("point is in a different chart");
  return eval(form_, form_point(form_, lift(point)));
}

double DefiningMap::normalized_value(const ChartPoint& point) const {
  if (scale_ == 0.0) return 0.0;
  return value(point) / scale_;
}

Eigen::VectorXd DefiningMap::gradient(const ChartPoint& point) const {
  if (point.chart != chart_) throw DimensionError("point is in a different chart");
  const auto tilde = lift(point);
  const auto at = form_point(form_, tilde);
  Eigen::Index total = 0;
  std::vector<Eigen::Index> offsets;
  for (auto c : counts_) {
    offsets.push_back(total);
    total += static_cast<Eigen::Index>(c) - 1;
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(total);
  for (auto k : form_.blocks) {
    const auto block_grad = grad(form_, at, k);
    // d tilde^k_j / d x = identity on j != l_k; tilde^k_{l_k} is fixed at 1.
    Eigen::Index pos = offsets[k];
    for (std::size_t j = 0; j < block_grad.size(); ++j) {
      if (j == chart_.l[k]) continue;
      g[pos++] = block_grad[j];
    }
  }
  return g;
}

DefiningMap defining_map(const FiniteGame& game, const HypersurfaceId& h, const ChartId& chart) {
  const auto& counts = game.strategy_counts();
  validate_chart(chart, counts);
  validate_hypersurface(h, counts);
  if (chart_excludes(chart, h)) {
    throw ChartExcludesHypersurface(
        to_string(h) + " lies in the complement of chart " +
        [&] {
          std::string s;
          for (std::size_t i = 0; i < chart.l.size(); ++i) s += (i ? "," : "") + std::to_string(chart.l[i]);
          return s;
        }() +
        " (a chart with l_i = j excludes the hyperplane whose tilde coordinate is j)");
  }
  if (const auto* c = std::get_if<CoordinateHyperplane>(&h)) {
    const std::size_t size = counts[c->player];
    Tensor<double> row(std::vector<std::size_t>{size});
    if (const auto t = tilde_index(*c)) {
      row[*t] = 1.0;
    } else {
      row[0] = 1.0;
      for (std::size_t j = 1; j < size; ++j) row[j] = -1.0;
    }
    return DefiningMap(h, chart,
                       MultilinearForm<double>{std::nullopt, {c->player}, std::move(row)}, counts);
  }
  const auto& d = std::get<PayoffDifference>(h);
  const auto decomposition = homogeneous_decomposition<double>(game, d.player);
  return DefiningMap(h, chart, decomposition.Lambdas[d.first] - decomposition.Lambdas[d.second],
                     counts);
}

bool on_hypersurface(const FiniteGame& game, const HypersurfaceId& h, const ChartPoint& point,
                     double tol) {
  const DefiningMap map = defining_map(game, h, point.chart);
  return std::fabs(map.normalized_value(point)) <= tol;
}

}  // namespace mixext
