#pragma once

#include <cstdint>
#include <random>

namespace recmix {

// A seeded random stream. Two streams built from the same (seed, stream_id)
// produce bit-identical sequences; distinct stream ids are decorrelated by
// hashing both words through splitmix64 before seeding the engine.
//
// Not thread-safe: each replication owns its stream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double normal();
  // Uniform on [0, 1).
  double uniform();
  bool bernoulli(double p);
  std::uint64_t poisson(double mean);

  std::mt19937_64& engine() { return engine_; }

  // Stream id for replication `index`: the index mixed with a fixed 64-bit
  // constant, so replications are independent of scheduling order.
  static std::uint64_t replication_stream(std::uint64_t index);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace recmix
