// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>

#include "sgl/kernels.hpp"

namespace sgl::kernels {
namespace {

const KernelTable* pick_default() {
  if (std::getenv("SGL_FORCE_SCALAR") == nullptr && cpu_supports_avx2()) {
    if (const KernelTable* t = avx2_table()) return t;
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool set_backend(Backend b) {
  if (b == Backend::Scalar) {
    current().store(&scalar_table(), std::memory_order_release);
    return true;
  }
  const KernelTable* t = avx2_table();
  if (t == nullptr || !cpu_supports_avx2()) return false;
  current().store(t, std::memory_order_release);
  return true;
}

std::string_view backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace sgl::kernels
