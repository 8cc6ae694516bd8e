#include "subnyq/dft.hpp"

#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace subnyq::dft {
namespace {

// FFTW planning is not thread-safe; execution through fftw_execute_dft is.
// Plans are created once per (size, direction) with FFTW_ESTIMATE, which is
// deterministic, so repeated runs produce bit-identical transforms.
class PlanCache {
public:
  ~PlanCache()
  {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign)
  {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    ComplexSeq in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
  static PlanCache instance;
  return instance;
}

ComplexSeq transform(std::span<const Complex> x, int sign)
{
  const std::size_t n = x.size();
  ComplexSeq in(x.begin(), x.end());
  ComplexSeq out(n);
  if (n == 0) return out;
  fftw_plan plan = cache().get(n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

ComplexSeq forward(std::span<const Complex> x) { return transform(x, FFTW_FORWARD); }

ComplexSeq inverse(std::span<const Complex> spectrum)
{
  ComplexSeq out = transform(spectrum, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

ComplexSeq series_coefficients(std::span<const Complex> x)
{
  ComplexSeq c = forward(x);
  const double scale = c.empty() ? 1.0 : 1.0 / static_cast<double>(c.size());
  for (auto& v : c) v *= scale;
  return c;
}

ComplexSeq synthesize(std::span<const Complex> coefficients) { return transform(coefficients, FFTW_BACKWARD); }

}  // namespace subnyq::dft
