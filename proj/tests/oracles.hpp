#pragma once

#include <cmath>
#include <functional>
#include <vector>

// Reference computations written independently of the library.
namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000)
{
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double bisect(const std::function<double(double)>& f, double a, double b, int it = 200)
{
    double fa = f(a);
    for (int i = 0; i < it; ++i) {
        double m = 0.5 * (a + b), fm = f(m);
        if ((fm > 0) == (fa > 0)) { a = m; fa = fm; } else b = m;
    }
    return 0.5 * (a + b);
}

inline double order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

inline double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace oracle
