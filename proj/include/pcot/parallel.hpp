#pragma once

#include <atomic>
#include <exception>
#include <utility>

namespace pcot::parallel {

// 0 = let OpenMP pick. Setting 1 forces the serial code path everywhere,
// which the scaling benchmarks rely on for clean measurements.
void set_threads(int n);
int threads();

// True when the parallel variants of the kernels should run.
bool enabled();

double wtime();

// Exceptions must not escape an OpenMP region, so loop bodies that can throw
// run through one of these: the first exception is kept, later iterations
// become no-ops, and rethrow() surfaces it after the join.
class ExceptionGate {
public:
    template <typename Fn>
    void run(Fn&& fn) noexcept {
        if (tripped_.load(std::memory_order_relaxed)) return;
        try {
            std::forward<Fn>(fn)();
        } catch (...) {
            if (!tripped_.exchange(true)) err_ = std::current_exception();
        }
    }
    void rethrow() {
        if (tripped_.load() && err_) std::rethrow_exception(err_);
    }

private:
    std::atomic<bool> tripped_{false};
    std::exception_ptr err_;
};

} // namespace pcot::parallel
