#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <string>

#include "gtpool/errors.hpp"
#include "kernels/tables.hpp"

namespace gtpool::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(GTPOOL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& best_available() {
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (const KernelTable* t = table_for(isa)) return *t;
  }
  return scalar_table();
}

const KernelTable* initial_table() {
  const char* env = std::getenv("GTPOOL_SIMD");
  if (env == nullptr) return &best_available();
  std::string want(env);
  std::transform(want.begin(), want.end(), want.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (want == "scalar") return &scalar_table();
  if (want == "avx2" && table_for(Isa::Avx2) != nullptr) return table_for(Isa::Avx2);
  if (want == "neon" && table_for(Isa::Neon) != nullptr) return table_for(Isa::Neon);
  // "auto", unknown values and unavailable ISAs fall back to detection.
  return &best_available();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &scalar_table();
    case Isa::Avx2:
#if defined(GTPOOL_HAVE_AVX2)
      if (cpu_has_avx2()) return &avx2_kernel_table();
#endif
      return nullptr;
    case Isa::Neon:
#if defined(GTPOOL_HAVE_NEON)
      return &neon_kernel_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (table_for(isa) != nullptr) out.push_back(isa);
  }
  return out;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) {
    throw ArgumentError("kernel ISA '" + std::string(isa_name(isa)) + "' is not available");
  }
  current().store(t, std::memory_order_relaxed);
}

}  // namespace gtpool::kernels
