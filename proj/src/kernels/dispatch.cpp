#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels/kernels_impl.hpp"

namespace siclab::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(SICLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend best_backend() {
    if (const char* env = std::getenv("SICLAB_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return Backend::Scalar;
        if (want == "avx2" && table(Backend::Avx2)) return Backend::Avx2;
        if (want == "neon" && table(Backend::Neon)) return Backend::Neon;
    }
    if (table(Backend::Avx2)) return Backend::Avx2;
    if (table(Backend::Neon)) return Backend::Neon;
    return Backend::Scalar;
}

struct ActiveTable {
    KernelTable tables[3];
    std::atomic<int> current;

    ActiveTable() : tables{detail::scalar_table(), detail::scalar_table(), detail::scalar_table()} {
        if (auto t = table(Backend::Avx2)) tables[1] = *t;
        if (auto t = table(Backend::Neon)) tables[2] = *t;
        current.store(static_cast<int>(best_backend()));
    }
};

ActiveTable& state() {
    static ActiveTable s;
    return s;
}

}  // namespace

std::optional<KernelTable> table(Backend backend) {
    switch (backend) {
        case Backend::Scalar:
            return detail::scalar_table();
        case Backend::Avx2:
#ifdef SICLAB_HAVE_AVX2
            if (cpu_has_avx2()) return detail::avx2_table();
#endif
            return std::nullopt;
        case Backend::Neon:
#ifdef SICLAB_HAVE_NEON
            return detail::neon_table();
#else
            return std::nullopt;
#endif
    }
    return std::nullopt;
}

const KernelTable& active() {
    auto& s = state();
    return s.tables[s.current.load(std::memory_order_relaxed)];
}

void set_backend(Backend backend) {
    if (!table(backend)) {
        throw ConfigError("kernel backend '" + std::string(backend_name(backend)) + "' unavailable");
    }
    state().current.store(static_cast<int>(backend));
}

std::string_view backend_name(Backend backend) {
    switch (backend) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

Complex cdotc(std::span<const Complex> x, std::span<const Complex> y) {
    if (x.size() != y.size()) throw InputError("cdotc: length mismatch");
    return active().cdotc(x.data(), y.data(), x.size());
}

double energy(std::span<const Complex> x) { return active().energy(x.data(), x.size()); }

Complex rdot(std::span<const double> h, std::span<const Complex> x) {
    if (h.size() != x.size()) throw InputError("rdot: length mismatch");
    return active().rdot(h.data(), x.data(), h.size());
}

void fir(std::span<const Complex> taps, std::span<const Complex> x, std::span<Complex> out) {
    if (out.size() != x.size()) throw InputError("fir: output length must equal input length");
    active().fir(taps.data(), taps.size(), x.data(), x.size(), out.data());
}

void subtract(std::span<const Complex> a, std::span<const Complex> b, std::span<Complex> out) {
    if (a.size() != b.size() || out.size() != a.size()) throw InputError("subtract: length mismatch");
    active().subtract(a.data(), b.data(), a.size(), out.data());
}

}  // namespace siclab::kernels
