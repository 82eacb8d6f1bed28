#pragma once

// Thin FFTW wrapper. Plans are created once per (length, sign) and reused
// through the new-array execute interface, which is safe to call concurrently.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "fspde/error.hpp"

namespace fspde::fft {

using cplx = std::complex<double>;

enum class Sign : int { minus = FFTW_FORWARD, plus = FFTW_BACKWARD };

namespace detail {

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, Sign sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, static_cast<int>(sign));
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cplx> a(n), b(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                       reinterpret_cast<fftw_complex*>(b.data()), static_cast<int>(sign),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

}  // namespace detail

/// out_k = sum_i exp(sign * 2 pi i k i / n) in_i, unnormalized.
inline void transform(std::span<const cplx> in, std::span<cplx> out, Sign sign) {
    if (in.size() != out.size()) throw ShapeError("fft: input and output lengths differ");
    if (in.empty()) return;
    fftw_plan p = detail::PlanCache::instance().get(in.size(), sign);
    // FFTW never writes through the input pointer of an out-of-place plan.
    auto* src = const_cast<cplx*>(in.data());
    if (src == out.data()) {
        std::vector<cplx> tmp(in.begin(), in.end());
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()), reinterpret_cast<fftw_complex*>(out.data()));
        return;
    }
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(src), reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace fspde::fft
