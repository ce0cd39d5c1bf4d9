#include "shapelab/sampling.hpp"

namespace shapelab {

StarDomain random_domain(std::mt19937_64& rng, int max_k, double amplitude) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<FourierMode> modes;
  for (int k = 1; k <= max_k; ++k) {
    const double a = amplitude / k * uni(rng);
    const double b = amplitude / k * uni(rng);
    modes.push_back({k, a, b});
  }
  return StarDomain(Point::Zero(), 1.0, std::move(modes));
}

BoundaryField random_field(std::mt19937_64& rng, int max_k) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  BoundaryField f;
  for (int k = 0; k <= max_k; ++k) {
    const double a = uni(rng) / (1 + k);
    const double b = uni(rng) / (1 + k);
    f.modes.push_back({k, a, k == 0 ? 0.0 : b});
  }
  return f;
}

}  // namespace shapelab
