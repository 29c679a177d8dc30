#include "levylab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "levylab/error.hpp"

namespace levylab::fft {

namespace {

using Key = std::tuple<std::vector<std::size_t>, std::vector<std::size_t>, int>;

struct PlanCache {
  std::mutex mutex;
  std::map<Key, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_plan get_plan(const std::vector<std::size_t>& shape, const std::vector<std::size_t>& axes, int sign) {
  PlanCache& c = cache();
  std::lock_guard<std::mutex> lock(c.mutex);
  Key key{shape, axes, sign};
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;

  std::vector<std::size_t> stride(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) stride[i - 1] = stride[i] * shape[i];
  std::vector<bool> transformed(shape.size(), false);
  std::vector<fftw_iodim> dims;
  for (std::size_t a : axes) {
    if (a >= shape.size()) throw ValidationError("fft: axis out of range");
    transformed[a] = true;
    dims.push_back({static_cast<int>(shape[a]), static_cast<int>(stride[a]), static_cast<int>(stride[a])});
  }
  std::vector<fftw_iodim> batch;
  for (std::size_t a = 0; a < shape.size(); ++a) {
    if (!transformed[a]) batch.push_back({static_cast<int>(shape[a]), static_cast<int>(stride[a]), static_cast<int>(stride[a])});
  }
  std::size_t total = 1;
  for (std::size_t s : shape) total *= s;
  // FFTW_ESTIMATE never touches the arrays during planning.
  auto* scratch = fftw_alloc_complex(total);
  fftw_plan plan = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(), static_cast<int>(batch.size()),
                                      batch.data(), scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (plan == nullptr) throw NumericFailure("fft: planner failed", 0.0);
  c.plans.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void transform_axes(std::complex<double>* data, const std::vector<std::size_t>& shape,
                    const std::vector<std::size_t>& axes, Direction dir) {
  if (axes.empty()) return;
  const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = get_plan(shape, axes, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, ptr, ptr);
}

void transform(std::complex<double>* data, const std::vector<std::size_t>& shape, Direction dir) {
  std::vector<std::size_t> axes(shape.size());
  for (std::size_t i = 0; i < axes.size(); ++i) axes[i] = i;
  transform_axes(data, shape, axes, dir);
}

}  // namespace levylab::fft
