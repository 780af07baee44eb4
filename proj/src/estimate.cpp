#include "wiener/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "wiener/errors.hpp"

namespace wiener {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary out;
  std::vector<double> kept;
  kept.reserve(values.size());
  for (double v : values) {
    if (std::isnan(v)) {
      ++out.rejected;
    } else {
      kept.push_back(v);
      out.max_abs = std::max(out.max_abs, std::abs(v));
    }
  }
  out.count = kept.size();
  if (kept.empty()) return out;
  out.mean = pairwise_sum(kept) / static_cast<double>(kept.size());
  if (kept.size() > 1) {
    for (double& v : kept) v = (v - out.mean) * (v - out.mean);
    const double var = pairwise_sum(kept) / static_cast<double>(kept.size() - 1);
    out.std_error = std::sqrt(var / static_cast<double>(kept.size()));
  }
  return out;
}

std::vector<double> draw_samples(std::size_t count, std::uint64_t seed, int workers, const WorkerFactory& factory) {
  if (count == 0) throw DomainError("sample count must be positive");
  if (workers < 1) throw DomainError("worker count must be >= 1");
  std::vector<double> values(count);
  const auto w_count = static_cast<std::size_t>(workers);
  auto run = [&](std::size_t w) {
    const std::size_t begin = w * count / w_count;
    const std::size_t end = (w + 1) * count / w_count;
    Rng rng = make_stream(seed, w);
    SampleFn fn = factory();
    for (std::size_t i = begin; i < end; ++i) values[i] = fn(rng);
  };
  if (workers == 1) {
    run(0);
    return values;
  }
  std::vector<std::exception_ptr> errors(w_count);
  std::vector<std::thread> pool;
  pool.reserve(w_count);
  for (std::size_t w = 0; w < w_count; ++w) {
    pool.emplace_back([&, w] {
      try {
        run(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return values;
}

}  // namespace wiener
