#include "swrhc/kernels.hpp"

#include <cstdlib>
#include <string>

namespace swrhc::kernels {

#if defined(SWRHC_BUILD_AVX2)
const KernelTable& avx2_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(SWRHC_BUILD_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_table_unchecked() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& table = [] () -> const KernelTable& {
        const char* forced = std::getenv("SWRHC_ISA");
        if (forced != nullptr && std::string(forced) == "scalar") return scalar_table();
        if (const KernelTable* simd = avx2_table()) return *simd;
        return scalar_table();
    }();
    return table;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    }
    return "unknown";
}

} // namespace swrhc::kernels
