#pragma once

#include <random>

#include "cascadefuse/features.hpp"
#include "cascadefuse/model.hpp"

namespace testutil {

/// Random bundle matching `cfg`; the first `real` positions are unmasked.
inline cascadefuse::FeatureBundle toy_bundle(const cascadefuse::ModelConfig& cfg, std::size_t real, std::uint64_t seed,
                                             cascadefuse::Label label = cascadefuse::Label::Fake) {
  using namespace cascadefuse;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  FeatureBundle b;
  b.story_id = "toy" + std::to_string(seed);
  b.label = label;
  for (std::size_t i = 0; i < cfg.seq_len; ++i) {
    SparseVector l{cfg.vocab_size, {}, {}};
    UserVector user{};
    if (i < real) {
      for (std::uint32_t k = 0; k < cfg.vocab_size; ++k)
        if (u(rng) > 0.3) {
          l.index.push_back(k);
          l.value.push_back(1 + u(rng));
        }
      for (auto& x : user) x = u(rng);
    }
    b.linguistic.push_back(l);
    b.users.push_back(user);
    b.mask.push_back(i < real ? 1 : 0);
  }
  if (cfg.uses_time()) {
    std::vector<double> s(cfg.temporal_len);
    for (double& x : s) x = u(rng);
    b.temporal = s;
  }
  return b;
}

inline cascadefuse::ModelConfig toy_config(cascadefuse::Variant v = cascadefuse::Variant::Full) {
  cascadefuse::ModelConfig c;
  c.variant = v;
  c.vocab_size = 8;
  c.embed_dim = 5;
  c.seq_len = 3;
  c.temporal_len = 3;
  c.hidden_l = c.hidden_u = 4;
  c.hidden_s = 4;
  c.f2_divisor = 2;
  c.tau = 2;
  return c;
}

}  // namespace testutil
