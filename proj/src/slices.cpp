#include "axial/slices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace axial {

bool SliceData::complete() const
{
    return std::all_of(filled.begin(), filled.end(), [](char c) { return c != 0; });
}

SliceSampler::SliceSampler(const Grid& g, const std::vector<SliceRequest>& requests) : g_(g)
{
    for (const auto& rq : requests) {
        SliceData s;
        s.name = rq.slicing.name;
        s.tau = rq.tau;
        int i0 = static_cast<int>(std::ceil((rq.slicing.x_lo - g.x0) / g.h - 1e-9));
        int i1 = static_cast<int>(std::floor((rq.slicing.x_hi - g.x0) / g.h + 1e-9));
        i0 = std::max(i0, 0);
        i1 = std::min(i1, g.n - 1);
        if (i1 <= i0) throw std::invalid_argument("slice window lies outside the evolution grid");
        const int sid = static_cast<int>(slices_.size());
        for (int i = i0; i <= i1; ++i) {
            double t = rq.tau + rq.slicing.h(g.pts[i]);
            int j = static_cast<int>(s.node.size());
            s.node.push_back(i);
            s.x.push_back(g.x(i));
            s.t.push_back(t);
            s.hprime.push_back(rq.slicing.h_prime(g.pts[i]));
            (t >= 0.0 ? fwd_ : bwd_).push_back({std::abs(t), sid, j});
            t_max_ = std::max(t_max_, t);
            t_min_ = std::min(t_min_, t);
        }
        s.u.assign(s.node.size(), 0.0);
        s.ut = s.u;
        s.ux = s.u;
        s.filled.assign(s.node.size(), 0);
        slices_.push_back(std::move(s));
    }
    auto by_t = [](const Event& a, const Event& b) { return a.t < b.t; };
    std::sort(fwd_.begin(), fwd_.end(), by_t);
    std::sort(bwd_.begin(), bwd_.end(), by_t);
}

void SliceSampler::handle(const StepView& sv, std::vector<Event>& ev, size_t& cursor, double sign)
{
    const double dt = sv.t1 - sv.t0;
    while (cursor < ev.size() && ev[cursor].t <= sv.t1 + 1e-12 * dt) {
        const Event& e = ev[cursor++];
        SliceData& s = slices_[e.slice];
        const int i = s.node[e.j];
        double th = std::clamp((e.t - sv.t0) / dt, 0.0, 1.0);
        double h00 = 2 * th * th * th - 3 * th * th + 1, h10 = th * th * th - 2 * th * th + th;
        double h01 = -2 * th * th * th + 3 * th * th, h11 = th * th * th - th * th;
        auto herm = [&](double p0, double d0, double p1, double d1) {
            return h00 * p0 + h10 * dt * d0 + h01 * p1 + h11 * dt * d1;
        };
        const double h = g_.h;
        double ux0 = fd1_at(sv.u0, i, h, 8), ux1 = fd1_at(sv.u1, i, h, 8);
        double vx0 = fd1_at(sv.v0, i, h, 8), vx1 = fd1_at(sv.v1, i, h, 8);
        s.u[e.j] = herm(sv.u0[i], sv.v0[i], sv.u1[i], sv.v1[i]);
        s.ut[e.j] = sign * herm(sv.v0[i], sv.a0[i], sv.v1[i], sv.a1[i]);
        s.ux[e.j] = herm(ux0, vx0, ux1, vx1);
        s.filled[e.j] = 1;
    }
}

StepObserver SliceSampler::forward()
{
    return [this](const StepView& sv) { handle(sv, fwd_, cf_, 1.0); };
}

StepObserver SliceSampler::backward()
{
    return [this](const StepView& sv) { handle(sv, bwd_, cb_, -1.0); };
}

void SliceSampler::require_complete() const
{
    for (const auto& s : slices_)
        if (!s.complete())
            throw std::logic_error("slice " + s.name + " at tau = " + std::to_string(s.tau) +
                                   " was not fully sampled; the run ended too early");
}

}  // namespace axial
