#include "epm/rng.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace epm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  std::uint32_t words[8];
  for (auto& w : words) {
    s = splitmix64(s);
    w = static_cast<std::uint32_t>(s >> 32);
  }
  std::seed_seq seq(std::begin(words), std::end(words));
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(seeded_engine(seed, stream)) {}

Rng Rng::split(std::uint64_t id) const {
  return Rng(seed_, splitmix64(stream_ * 0x9e3779b97f4a7c15ULL + id + 1));
}

double Rng::uniform() {
  // 53 random bits mapped to (0,1); zero is rejected.
  for (;;) {
    double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::normal() { return normal_(engine_); }

double Rng::gamma_unit(double shape) {
  return gamma_(engine_, std::gamma_distribution<double>::param_type(shape, 1.0));
}

void Rng::save(std::ostream& os) const {
  os << seed_ << ' ' << stream_ << ' ' << engine_ << ' ' << normal_ << ' ' << gamma_;
}

void Rng::load(std::istream& is) {
  is >> seed_ >> stream_ >> engine_ >> normal_ >> gamma_;
  if (!is) throw std::runtime_error("rng: malformed state");
}

bool operator==(const Rng& a, const Rng& b) {
  return a.seed_ == b.seed_ && a.stream_ == b.stream_ && a.engine_ == b.engine_ &&
         a.normal_ == b.normal_ &&
         a.gamma_ == b.gamma_;
}

}  // namespace epm
