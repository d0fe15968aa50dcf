#include <cstdlib>
#include <string_view>

#include "frameforge/error.hpp"
#include "frameforge/kernels.hpp"

namespace frameforge::kernels {

#if defined(FRAMEFORGE_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table();
}
#endif

const KernelTable* avx2() {
#if defined(FRAMEFORGE_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable& select() {
    const char* forced = std::getenv("FRAMEFORGE_KERNELS");
    const std::string_view choice = forced ? forced : "auto";
    if (choice == "scalar") {
        return scalar();
    }
    if (choice == "avx2") {
        if (const auto* table = avx2()) {
            return *table;
        }
        throw InvalidArgument("FRAMEFORGE_KERNELS=avx2 but AVX2 kernels are unavailable");
    }
    if (choice != "auto") {
        throw InvalidArgument("FRAMEFORGE_KERNELS must be scalar, avx2 or auto");
    }
    if (const auto* table = avx2()) {
        return *table;
    }
    return scalar();
}

} // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

} // namespace frameforge::kernels
