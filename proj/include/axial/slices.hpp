#pragma once

#include <string>
#include <vector>

#include "axial/evolution.hpp"
#include "axial/geometry.hpp"
#include "axial/grid.hpp"

namespace axial {

struct SliceRequest {
    Slicing slicing;
    double tau = 0.0;
};

// Samples of (u, u_t, u_x) at the grid nodes of one slice t = tau + h(r*).
struct SliceData {
    std::string name;
    double tau = 0.0;
    std::vector<int> node;
    std::vector<double> x, t, hprime, u, ut, ux;
    std::vector<char> filled;

    bool complete() const;
    size_t size() const { return node.size(); }
};

// Collects slice samples while an evolution runs. Crossing times t >= 0 are served by
// the forward observer; t < 0 by the observer of a run started from (u0, -v0).
class SliceSampler {
public:
    SliceSampler(const Grid& g, const std::vector<SliceRequest>& requests);

    double t_max() const { return t_max_; }
    double t_min() const { return t_min_; }
    bool needs_backward() const { return t_min_ < 0.0; }

    StepObserver forward();
    StepObserver backward();

    const std::vector<SliceData>& slices() const { return slices_; }
    void require_complete() const;

private:
    struct Event {
        double t;
        int slice, j;
    };
    void handle(const StepView& sv, std::vector<Event>& ev, size_t& cursor, double sign);

    const Grid& g_;
    std::vector<SliceData> slices_;
    std::vector<Event> fwd_, bwd_;
    size_t cf_ = 0, cb_ = 0;
    double t_max_ = 0.0, t_min_ = 0.0;
};

}  // namespace axial
