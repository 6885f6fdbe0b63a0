#include "mixext/game.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace mixext {
namespace {

template <class Scalar>
std::vector<Tensor<Scalar>> build_tensors(const std::vector<std::size_t>& counts,
                                          const std::vector<std::vector<Scalar>>& flat) {
  if (flat.size() != counts.size()) {
    throw ShapeError("expected " + std::to_string(counts.size()) +
                     " utility tensors, got " + std::to_string(flat.size()));
  }
  std::vector<Tensor<Scalar>> tensors;
  const std::size_t volume = Tensor<Scalar>::volume(counts);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (flat[i].size() != volume) {
      throw ShapeError("utility tensor " + std::to_string(i + 1) + " has " +
                       std::to_string(flat[i].size()) + " entries, expected " +
                       std::to_string(volume));
    }
    tensors.emplace_back(counts, flat[i]);
  }
  return tensors;
}

}  // namespace

FiniteGame::FiniteGame(std::vector<std::size_t> strategy_counts,
                       std::vector<Tensor<double>> utilities)
    : mode_(NumericMode::kFloat),
      counts_(std::move(strategy_counts)),
      float_utilities_(std::move(utilities)) {
  std::vector<std::vector<std::size_t>> shapes;
  for (const auto& t : float_utilities_) shapes.push_back(t.shape());
  validate_shapes(float_utilities_.size(), shapes);
  for (std::size_t i = 0; i < float_utilities_.size(); ++i) {
    for (double x : float_utilities_[i].data()) {
      if (!std::isfinite(x)) {
        throw NonFiniteError("utility tensor " + std::to_string(i + 1) +
                             " has a non-finite entry");
      }
    }
  }
}

FiniteGame::FiniteGame(std::vector<std::size_t> strategy_counts,
                       std::vector<Tensor<Rational>> utilities)
    : mode_(NumericMode::kRational),
      counts_(std::move(strategy_counts)),
      exact_utilities_(std::move(utilities)) {
  std::vector<std::vector<std::size_t>> shapes;
  for (const auto& t : exact_utilities_) shapes.push_back(t.shape());
  validate_shapes(exact_utilities_.size(), shapes);
  for (const auto& t : exact_utilities_) {
    std::vector<double> converted;
    converted.reserve(t.size());
    for (const auto& x : t.data()) converted.push_back(x.get_d());
    float_utilities_.emplace_back(counts_, std::move(converted));
  }
}

void FiniteGame::validate_shapes(std::size_t tensor_count,
                                 const std::vector<std::vector<std::size_t>>& shapes) const {
  if (counts_.empty()) throw ShapeError("a game needs at least one player");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 2) {
      throw ShapeError("player " + std::to_string(i + 1) +
                       " needs at least 2 pure strategies");
    }
  }
  if (tensor_count != counts_.size()) {
    throw ShapeError("expected " + std::to_string(counts_.size()) +
                     " utility tensors, got " + std::to_string(tensor_count));
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (shapes[i] != counts_) {
      throw ShapeError("utility tensor " + std::to_string(i + 1) +
                       " does not match the strategy counts");
    }
  }
}

std::size_t FiniteGame::dimension() const {
  std::size_t d = 0;
  for (auto c : counts_) d += c - 1;
  return d;
}

template <>
const Tensor<double>& FiniteGame::utility<double>(std::size_t player) const {
  return float_utilities_.at(player);
}

template <>
const Tensor<Rational>& FiniteGame::utility<Rational>(std::size_t player) const {
  if (mode_ != NumericMode::kRational) {
    throw std::logic_error("exact utilities requested from a float-mode game");
  }
  return exact_utilities_.at(player);
}

FiniteGame FiniteGame::with_labels(std::vector<std::vector<std::string>> labels) const {
  if (!labels.empty()) {
    if (labels.size() != counts_.size()) throw ShapeError("one label list per player");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].size() != counts_[i]) {
        throw ShapeError("player " + std::to_string(i + 1) + " label count mismatch");
      }
    }
  }
  FiniteGame copy = *this;
  copy.labels_ = std::move(labels);
  return copy;
}

bool operator==(const FiniteGame& a, const FiniteGame& b) {
  if (a.mode_ != b.mode_ || a.counts_ != b.counts_) return false;
  if (a.mode_ == NumericMode::kRational) return a.exact_utilities_ == b.exact_utilities_;
  return a.float_utilities_ == b.float_utilities_;
}

FiniteGame make_game(std::vector<std::size_t> strategy_counts,
                     const std::vector<std::vector<double>>& utilities) {
  auto tensors = build_tensors(strategy_counts, utilities);
  return FiniteGame(std::move(strategy_counts), std::move(tensors));
}

FiniteGame make_game(std::vector<std::size_t> strategy_counts,
                     const std::vector<std::vector<Rational>>& utilities) {
  auto tensors = build_tensors(strategy_counts, utilities);
  return FiniteGame(std::move(strategy_counts), std::move(tensors));
}

template <class Scalar>
bool in_affine_span(const MixedProfile<Scalar>& profile, double tol) {
  for (const auto& w : profile.weights) {
    Scalar sum(0);
    for (const auto& x : w) sum += x;
    if constexpr (std::is_same_v<Scalar, Rational>) {
      if (sum != 1) return false;
    } else {
      if (std::fabs(sum - 1.0) > tol) return false;
    }
  }
  return true;
}

template <class Scalar>
bool in_simplex_product(const MixedProfile<Scalar>& profile, double tol) {
  if (!in_affine_span(profile, tol)) return false;
  for (const auto& w : profile.weights) {
    for (const auto& x : w) {
      if constexpr (std::is_same_v<Scalar, Rational>) {
        if (x < 0 || x > 1) return false;
      } else {
        if (x < -tol || x > 1.0 + tol) return false;
      }
    }
  }
  return true;
}

template bool in_affine_span(const MixedProfile<double>&, double);
template bool in_affine_span(const MixedProfile<Rational>&, double);
template bool in_simplex_product(const MixedProfile<double>&, double);
template bool in_simplex_product(const MixedProfile<Rational>&, double);

MixedProfile<double> to_double(const MixedProfile<Rational>& profile) {
  MixedProfile<double> out;
  for (const auto& w : profile.weights) {
    std::vector<double> v;
    for (const auto& x : w) v.push_back(x.get_d());
    out.weights.push_back(std::move(v));
  }
  return out;
}

bool SupportProfile::contains(std::size_t player, std::size_t strategy) const {
  const auto& s = supports.at(player);
  return std::binary_search(s.begin(), s.end(), strategy);
}

SupportProfile support_of(const MixedProfile<double>& profile, double zero_tol) {
  SupportProfile out;
  for (const auto& w : profile.weights) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (std::fabs(w[j]) > zero_tol) s.push_back(j);
    }
    out.supports.push_back(std::move(s));
  }
  return out;
}

SupportProfile support_of(const MixedProfile<Rational>& profile) {
  SupportProfile out;
  for (const auto& w : profile.weights) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (!is_zero(w[j])) s.push_back(j);
    }
    out.supports.push_back(std::move(s));
  }
  return out;
}

std::string format_support(const SupportProfile& support) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < support.supports.size(); ++i) {
    if (i) out << ',';
    out << '{';
    for (std::size_t k = 0; k < support.supports[i].size(); ++k) {
      if (k) out << ',';
      out << support.supports[i][k];
    }
    out << '}';
  }
  out << ')';
  return out.str();
}

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else {
      const std::size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
             text[i] != '#') {
        ++i;
      }
      tokens.push_back({std::string(text.substr(start, i - start)), line});
    }
  }
  return tokens;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  std::size_t line() const {
    if (tokens_.empty()) return 1;
    return done() ? tokens_.back().line : tokens_[pos_].line;
  }
  const Token& next(const char* expected) {
    if (done()) throw ParseError(line(), std::string("unexpected end of input, expected ") + expected);
    return tokens_[pos_++];
  }
  void expect_keyword(const char* keyword) {
    const Token& t = next(keyword);
    if (t.text != keyword) {
      throw ParseError(t.line, std::string("expected '") + keyword + "', got '" + t.text + "'");
    }
  }
  std::size_t next_count(const char* what) {
    const Token& t = next(what);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw ParseError(t.line, std::string("expected ") + what + ", got '" + t.text + "'");
    }
    return value;
  }
  bool peek_is(const char* keyword) const {
    return !done() && tokens_[pos_].text == keyword;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

template <class Scalar>
FiniteGame parse_payoffs(TokenStream& in, std::vector<std::size_t> counts) {
  const std::size_t m = counts.size();
  const std::size_t volume = Tensor<Scalar>::volume(counts);
  std::vector<std::vector<Scalar>> utilities;
  for (std::size_t i = 0; i < m; ++i) {
    if (in.done()) {
      throw ParseError(in.line(), "declared " + std::to_string(m) + " players but found " +
                                      std::to_string(i) + " payoff tensors");
    }
    in.expect_keyword("payoff");
    const std::size_t line = in.line();
    const std::size_t player = in.next_count("player index");
    if (player != i + 1) {
      throw ParseError(line, "expected 'payoff " + std::to_string(i + 1) + "'");
    }
    std::vector<Scalar> values;
    values.reserve(volume);
    for (std::size_t k = 0; k < volume; ++k) {
      if (in.peek_is("payoff")) {
        throw ParseError(in.line(), "payoff " + std::to_string(i + 1) + " has " +
                                        std::to_string(k) + " entries, expected " +
                                        std::to_string(volume));
      }
      const Token& t = in.next("payoff entry");
      try {
        values.push_back(parse_scalar<Scalar>(t.text));
      } catch (const std::invalid_argument& e) {
        throw ParseError(t.line, e.what());
      }
      if (!is_finite(values.back())) throw ParseError(t.line, "non-finite payoff entry");
    }
    utilities.push_back(std::move(values));
  }
  if (!in.done()) {
    throw ParseError(in.line(), "trailing content after the last payoff tensor");
  }
  return make_game(std::move(counts), utilities);
}

}  // namespace

FiniteGame parse_game(std::string_view text, NumericMode mode) {
  TokenStream in(tokenize(text));
  in.expect_keyword("players");
  const std::size_t m = in.next_count("player count");
  if (m == 0) throw ParseError(in.line(), "player count must be at least 1");
  in.expect_keyword("strategies");
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t line = in.line();
    const std::size_t c = in.next_count("strategy count");
    if (c < 2) throw ParseError(line, "each player needs at least 2 strategies");
    counts.push_back(c);
  }
  if (mode == NumericMode::kRational) return parse_payoffs<Rational>(in, std::move(counts));
  return parse_payoffs<double>(in, std::move(counts));
}

namespace {

template <class Scalar>
void write_payoffs(std::ostringstream& out, const FiniteGame& game) {
  const std::size_t last = game.strategy_counts().back();
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    out << "payoff " << (i + 1) << '\n';
    const auto& data = game.utility<Scalar>(i).data();
    for (std::size_t k = 0; k < data.size(); ++k) {
      out << format_scalar(data[k]) << ((k + 1) % last == 0 ? '\n' : ' ');
    }
  }
}

}  // namespace

std::string serialize_game(const FiniteGame& game) {
  std::ostringstream out;
  out << "players " << game.num_players() << '\n' << "strategies";
  for (auto c : game.strategy_counts()) out << ' ' << c;
  out << '\n';
  if (game.exact()) {
    write_payoffs<Rational>(out, game);
  } else {
    write_payoffs<double>(out, game);
  }
  return out.str();
}

FiniteGame random_game(std::vector<std::size_t> strategy_counts, std::uint64_t seed,
                       Distribution distribution) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t volume = Tensor<double>::volume(strategy_counts);
  std::vector<std::vector<double>> utilities(strategy_counts.size());
  for (auto& u : utilities) {
    u.resize(volume);
    for (auto& x : u) x = distribution == Distribution::kUniform ? uniform(rng) : normal(rng);
  }
  return make_game(std::move(strategy_counts), utilities);
}

std::vector<std::size_t> parse_shape(std::string_view text) {
  std::vector<std::size_t> counts;
  std::size_t start = 0;
  while (true) {
    const std::size_t x = text.find('x', start);
    std::string_view part = text.substr(start, x == std::string_view::npos ? text.npos : x - start);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw std::invalid_argument("malformed shape '" + std::string(text) + "'");
    }
    if (value < 2) {
      throw std::invalid_argument("shape '" + std::string(text) +
                                  "': every player needs at least 2 strategies");
    }
    counts.push_back(value);
    if (x == std::string_view::npos) break;
    start = x + 1;
  }
  return counts;
}

std::string format_shape(const std::vector<std::size_t>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(counts[i]);
  }
  return s;
}

}  // namespace mixext
