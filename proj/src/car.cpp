#include "mieeg/preprocess.hpp"

namespace mieeg {

Epoch apply_car(const Epoch& epoch) {
  const std::size_t n_ch = epoch.n_channels();
  const std::size_t n = epoch.n_samples();
  if (n_ch < 2) throw Error(ErrorCode::SingleChannel, "common average reference needs at least 2 channels");

  const auto in = epoch.data();
  std::vector<double> out(in.begin(), in.end());
  const double inv = 1.0 / static_cast<double>(n_ch);
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    for (std::size_t c = 0; c < n_ch; ++c) sum += in[c * n + t];
    const double avg = sum * inv;
    for (std::size_t c = 0; c < n_ch; ++c) out[c * n + t] -= avg;
  }
  return epoch.with_data(std::move(out));
}

}  // namespace mieeg
