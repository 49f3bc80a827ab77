#include "tensorfield/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace tensorfield::kernels {

namespace {

const Kernels* pick_auto() {
#ifdef TENSORFIELD_HAVE_AVX2_LANE
  if (cpu_has_avx2()) return &avx2_kernels;
#endif
  return &scalar_kernels;
}

const Kernels* pick_initial() {
  if (const char* env = std::getenv("TENSORFIELD_SIMD")) {
    std::string_view want(env);
    if (want == "scalar") return &scalar_kernels;
#ifdef TENSORFIELD_HAVE_AVX2_LANE
    if (want == "avx2" && cpu_has_avx2()) return &avx2_kernels;
#endif
    // unknown or unavailable lane names fall through to auto
  }
  return pick_auto();
}

std::atomic<const Kernels*>& current() {
  static std::atomic<const Kernels*> lane{pick_initial()};
  return lane;
}

}  // namespace

const Kernels& active() { return *current().load(std::memory_order_relaxed); }

const Kernels* lane(std::string_view name) {
  if (name == "scalar") return &scalar_kernels;
#ifdef TENSORFIELD_HAVE_AVX2_LANE
  if (name == "avx2" && cpu_has_avx2()) return &avx2_kernels;
#endif
  if (name == "auto") return pick_auto();
  return nullptr;
}

bool select(std::string_view name) {
  const Kernels* k = lane(name);
  if (!k) return false;
  current().store(k, std::memory_order_relaxed);
  return true;
}

std::vector<std::string> available_lanes() {
  std::vector<std::string> lanes{"scalar"};
#ifdef TENSORFIELD_HAVE_AVX2_LANE
  if (cpu_has_avx2()) lanes.push_back("avx2");
#endif
  return lanes;
}

}  // namespace tensorfield::kernels
