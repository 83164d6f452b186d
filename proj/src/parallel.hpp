#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace surfdg::detail {

// SURFDG_THREADS caps the number of worker threads.
inline int thread_count()
{
    int n = 1;
#ifdef _OPENMP
    n = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("SURFDG_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0 && cap < n) {
                n = cap;
            }
        } catch (const std::exception&) {
        }
    }
    return n;
}

// Runs body(i) for i in [0, n). Each iteration must only write state owned by
// index i, which keeps results independent of the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body)
{
#ifdef _OPENMP
    std::exception_ptr error;
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 64) num_threads(thread_count())
    for (long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(surfdg_parallel_error)
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
#else
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
#endif
}

} // namespace surfdg::detail
