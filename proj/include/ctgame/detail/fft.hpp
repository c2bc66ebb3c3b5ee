#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>

#include "ctgame/error.hpp"

namespace ctgame::detail {

// FFTW planner calls are not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Owning buffer plus an in-place forward DFT plan of fixed size.
class ForwardFft {
public:
    explicit ForwardFft(std::size_t n) : n_(n) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (buf_ == nullptr) throw NumericalError("fft: allocation failed");
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        if (plan_ == nullptr) {
            fftw_free(buf_);
            throw NumericalError("fft: planning failed");
        }
    }
    ForwardFft(const ForwardFft&) = delete;
    ForwardFft& operator=(const ForwardFft&) = delete;
    ~ForwardFft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }

    std::span<std::complex<double>> data() noexcept {
        return {reinterpret_cast<std::complex<double>*>(buf_), n_};
    }
    void execute() noexcept { fftw_execute(plan_); }
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_;
    fftw_complex* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace ctgame::detail
