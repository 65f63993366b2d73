#include "artkit/qrs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace artkit::qrs {

double van_der_corput(std::uint64_t i, std::uint32_t base) {
  if (base < 2) throw ConfigError("Van der Corput base must be >= 2");
  // Reverse the digits into an integer numerator over base^k, then divide
  // once; exact while base^k stays within 53 bits.
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  std::uint64_t rest = i;
  constexpr std::uint64_t kExact = std::uint64_t{1} << 53;
  while (rest > 0 && denominator <= kExact / base) {
    numerator = numerator * base + rest % base;
    denominator *= base;
    rest /= base;
  }
  double value = static_cast<double>(numerator) / static_cast<double>(denominator);
  // Remaining high digits contribute below the precision already reached.
  double scale = 1.0 / static_cast<double>(denominator);
  while (rest > 0) {
    scale /= base;
    value += static_cast<double>(rest % base) * scale;
    rest /= base;
  }
  return value < 1.0 ? value : std::nextafter(1.0, 0.0);
}

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t k = 2; k * k <= n; ++k) {
    if (n % k == 0) return false;
  }
  return true;
}

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t n = 2; out.size() < count; ++n) {
    if (is_prime(n)) out.push_back(n);
  }
  return out;
}

void validate_halton_bases(std::span<const std::uint32_t> bases) {
  if (bases.empty()) throw ConfigError("Halton sequence needs at least one base");
  std::set<std::uint32_t> seen;
  for (auto b : bases) {
    if (!is_prime(b)) throw ConfigError(fmt::format("Halton base {} is not prime", b));
    if (!seen.insert(b).second) {
      throw ConfigError(fmt::format("Halton base {} repeated; bases must be pairwise coprime", b));
    }
  }
}

TestCase halton(std::uint64_t i, std::span<const std::uint32_t> bases) {
  std::vector<double> c(bases.size());
  for (std::size_t j = 0; j < bases.size(); ++j) c[j] = van_der_corput(i, bases[j]);
  return TestCase(std::move(c));
}

DirectionTable::DirectionTable(std::vector<DirectionEntry> entries) : entries_(std::move(entries)) {
  directions_.resize(entries_.size());
  for (std::size_t d = 0; d < entries_.size(); ++d) {
    const auto& e = entries_[d];
    if (e.dim != d + 1) {
      throw ConfigError(fmt::format("direction table entry {} is labelled dimension {}", d + 1, e.dim));
    }
    if (e.initial.size() != e.degree) {
      throw ConfigError(fmt::format("dimension {}: expected {} initial values, got {}", e.dim,
                                    e.degree, e.initial.size()));
    }
    if (e.degree >= kBits || (e.degree > 0 && e.coefficients >= (1u << (e.degree - 1)))) {
      throw ConfigError(fmt::format("dimension {}: coefficients do not fit degree {}", e.dim, e.degree));
    }
    auto& v = directions_[d];
    if (e.degree == 0) {
      for (int j = 0; j < kBits; ++j) v[j] = std::uint32_t{1} << (kBits - 1 - j);
      continue;
    }
    const std::uint32_t s = e.degree;
    for (std::uint32_t j = 0; j < s; ++j) {
      const std::uint32_t m = e.initial[j];
      if (m % 2 == 0 || m >= (std::uint64_t{1} << (j + 1))) {
        throw ConfigError(fmt::format("dimension {}: initial value m_{} = {} must be odd and < 2^{}",
                                      e.dim, j + 1, m, j + 1));
      }
      v[j] = m << (kBits - 1 - j);
    }
    for (std::uint32_t j = s; j < static_cast<std::uint32_t>(kBits); ++j) {
      std::uint32_t value = v[j - s] ^ (v[j - s] >> s);
      for (std::uint32_t k = 1; k < s; ++k) {
        if ((e.coefficients >> (s - 1 - k)) & 1u) value ^= v[j - k];
      }
      v[j] = value;
    }
  }
}

const DirectionTable& DirectionTable::builtin() {
  static const DirectionTable table(std::vector<DirectionEntry>{
      {1, 0, 0, {}},
      {2, 1, 0, {1}},
      {3, 2, 1, {1, 3}},
      {4, 3, 1, {1, 3, 1}},
      {5, 3, 2, {1, 1, 1}},
      {6, 4, 1, {1, 1, 3, 3}},
      {7, 4, 4, {1, 3, 5, 13}},
      {8, 5, 2, {1, 1, 5, 5, 17}},
      {9, 5, 4, {1, 1, 5, 5, 5}},
      {10, 5, 7, {1, 1, 7, 11, 19}},
      {11, 5, 11, {1, 1, 5, 1, 1}},
      {12, 5, 13, {1, 1, 1, 3, 11}},
      {13, 5, 14, {1, 3, 5, 5, 31}},
      {14, 6, 1, {1, 3, 3, 9, 7, 49}},
      {15, 6, 13, {1, 1, 1, 15, 21, 21}},
      {16, 6, 16, {1, 3, 1, 13, 27, 49}},
  });
  return table;
}

DirectionTable DirectionTable::parse(std::istream& in) {
  std::vector<DirectionEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<long long> values;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(token, &used);
        if (used != token.size() || v < 0) throw std::invalid_argument(token);
        values.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("direction table line {}: bad field '{}'", line_no, token));
      }
    }
    if (values.size() < 3 || values.size() != 3 + static_cast<std::size_t>(values[1])) {
      throw ConfigError(fmt::format(
          "direction table line {}: expected '<dim> <degree> <coefficients> <m_1..m_degree>'",
          line_no));
    }
    DirectionEntry e;
    e.dim = static_cast<std::uint32_t>(values[0]);
    e.degree = static_cast<std::uint32_t>(values[1]);
    e.coefficients = static_cast<std::uint32_t>(values[2]);
    for (std::size_t k = 3; k < values.size(); ++k) {
      e.initial.push_back(static_cast<std::uint32_t>(values[k]));
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw ConfigError("direction table is empty");
  return DirectionTable(std::move(entries));
}

DirectionTable DirectionTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open direction table '{}'", path));
  return parse(in);
}

TestCase sobol(std::uint64_t i, const DirectionTable& table, std::size_t dims) {
  if (dims > table.capacity()) {
    throw ConfigError(fmt::format("Sobol table covers {} dimensions, {} requested",
                                  table.capacity(), dims));
  }
  if (i >> DirectionTable::kBits) throw ConfigError("Sobol index exceeds 32 bits");
  std::vector<double> c(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& v = table.directions(d);
    std::uint32_t x = 0;
    for (int j = 0; j < DirectionTable::kBits; ++j) {
      if ((i >> j) & 1u) x ^= v[j];
    }
    c[d] = std::ldexp(static_cast<double>(x), -DirectionTable::kBits);
  }
  return TestCase(std::move(c));
}

namespace {

double wrap_unit(double x) {
  x -= std::floor(x);
  return x < 1.0 ? x : 0.0;
}

}  // namespace

TestCase cranley_patterson(const TestCase& point, std::span<const double> shift) {
  if (shift.size() != point.dims()) throw ConfigError("rotation vector dimension mismatch");
  TestCase out = point;
  for (std::size_t j = 0; j < point.dims(); ++j) {
    double p = point[j] + shift[j];
    if (p >= 1.0) p -= 1.0;
    out[j] = p < 1.0 ? p : 0.0;
  }
  return out;
}

double cosine_offset(double amplitude, RngStream& rng) {
  // Inverse CDF of (pi / 4a) cos(pi x / 2a) on [-a, a].
  const double u = rng.uniform01();
  return amplitude * (2.0 / std::numbers::pi) * std::asin(2.0 * u - 1.0);
}

double Randomizer::amplitude_for(std::size_t dims) const {
  if (amplitude) return *amplitude;
  if (planned_n && *planned_n > 0) {
    return 0.5 / std::pow(static_cast<double>(*planned_n), 1.0 / static_cast<double>(dims));
  }
  return 1e-3;
}

void Randomizer::validate(std::size_t dims) const {
  if (!rotation.empty()) {
    if (rotation.size() != dims) throw ConfigError("rotation vector dimension mismatch");
    for (double v : rotation) {
      if (!(v >= 0.0 && v < 1.0)) throw ConfigError("rotation vector entries must lie in [0, 1)");
    }
  }
  if (amplitude && !(*amplitude >= 0.0 && *amplitude < 1.0)) {
    throw ConfigError("shake amplitude must lie in [0, 1)");
  }
}

TestCase shake_and_rotate(const TestCase& point, const Randomizer& randomizer, RngStream& rng) {
  if (randomizer.rotation.size() != point.dims()) {
    throw ConfigError("rotation vector dimension mismatch");
  }
  const double a = randomizer.amplitude_for(point.dims());
  TestCase out = point;
  for (std::size_t j = 0; j < point.dims(); ++j) {
    const double shaken = point[j] + cosine_offset(a, rng);
    out[j] = wrap_unit(shaken + randomizer.rotation[j]);
  }
  return out;
}

std::string_view to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::VanDerCorput: return "vdc";
    case SequenceKind::Halton: return "halton";
    case SequenceKind::Sobol: return "sobol";
  }
  return "halton";
}

std::string_view to_string(RandomizerKind kind) {
  switch (kind) {
    case RandomizerKind::None: return "none";
    case RandomizerKind::CranleyPatterson: return "cranley_patterson";
    case RandomizerKind::ShakeAndRotate: return "shake_and_rotate";
  }
  return "none";
}

SequenceKind sequence_kind_from_string(std::string_view name) {
  for (auto k : {SequenceKind::VanDerCorput, SequenceKind::Halton, SequenceKind::Sobol}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown quasi-random sequence '{}'", name));
}

RandomizerKind randomizer_kind_from_string(std::string_view name) {
  for (auto k : {RandomizerKind::None, RandomizerKind::CranleyPatterson,
                 RandomizerKind::ShakeAndRotate}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown randomizer '{}'", name));
}

QrsGenerator::QrsGenerator(InputDomain domain, SequenceSpec sequence, Randomizer randomizer)
    : domain_(std::move(domain)),
      sequence_(std::move(sequence)),
      randomizer_(std::move(randomizer)),
      active_(randomizer_) {
  const std::size_t d = domain_.dims();
  switch (sequence_.kind) {
    case SequenceKind::VanDerCorput:
      if (d != 1) throw ConfigError("the Van der Corput sequence is one-dimensional; use Halton");
      if (!is_prime(sequence_.base)) throw ConfigError("Van der Corput base must be prime");
      break;
    case SequenceKind::Halton:
      if (sequence_.bases.empty()) sequence_.bases = first_primes(d);
      if (sequence_.bases.size() != d) throw ConfigError("one Halton base per dimension required");
      validate_halton_bases(sequence_.bases);
      break;
    case SequenceKind::Sobol:
      if (sequence_.table == nullptr) sequence_.table = &DirectionTable::builtin();
      if (d > sequence_.table->capacity()) {
        throw ConfigError(fmt::format("Sobol table covers {} dimensions, {} requested",
                                      sequence_.table->capacity(), d));
      }
      break;
  }
  randomizer_.validate(d);
}

void QrsGenerator::reset() {
  index_ = 0;
  steps_ = 0;
  active_ = randomizer_;
}

TestCase QrsGenerator::raw(std::uint64_t i) const {
  switch (sequence_.kind) {
    case SequenceKind::VanDerCorput: return TestCase{van_der_corput(i, sequence_.base)};
    case SequenceKind::Halton: return halton(i, sequence_.bases);
    case SequenceKind::Sobol: return sobol(i, *sequence_.table, domain_.dims());
  }
  return {};
}

TestCase QrsGenerator::next(RngStream& rng) {
  const std::size_t d = domain_.dims();
  if (active_.kind != RandomizerKind::None && active_.rotation.empty()) {
    active_.rotation.resize(d);
    for (auto& v : active_.rotation) v = rng.uniform01();
  }
  TestCase unit = raw(++index_);
  ++steps_;
  switch (active_.kind) {
    case RandomizerKind::None: break;
    case RandomizerKind::CranleyPatterson: unit = cranley_patterson(unit, active_.rotation); break;
    case RandomizerKind::ShakeAndRotate: unit = shake_and_rotate(unit, active_, rng); break;
  }
  for (std::size_t j = 0; j < d; ++j) {
    unit[j] = clamp_half_open(domain_[j].lo + unit[j] * domain_[j].width(), domain_[j]);
  }
  return unit;
}

}  // namespace artkit::qrs
