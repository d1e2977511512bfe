#pragma once

#include <cstdint>
#include <vector>

#include "hyperres/radial.hpp"

namespace hyperres {

struct Disk {
    cplx center;
    double radius;
};

// Axis-aligned rectangle in the s-plane, minus optional small disks.
struct SearchRegion {
    double re_lo = 0.0, re_hi = 0.0;
    double im_lo = 0.0, im_hi = 0.0;
    std::vector<Disk> exclusions;

    void validate() const;
    bool contains(cplx s) const;  // closed rectangle, ignoring exclusions
    // Largest r with the closed disk |s - c| <= r inside the rectangle (0 if c is outside).
    double inscribed_radius(cplx c) const;
};

struct ResonanceOptions {
    RadialOptions radial;
    int threads = 1;
    // A zero closer than standoff_fraction * (cell diameter) to a cell boundary
    // triggers a jittered retry.
    double standoff_fraction = 1e-3;
    int jitter_retries = 5;
    std::uint64_t seed = 0x5eed5eedULL;
    // Initial boundary sample spacing; segments are bisected until arg steps are < pi/2.
    double max_sample_step = 0.1;
    // Evaluations of D_l allowed per channel.
    long long eval_budget = 400000;
    // Cells smaller than this (in diameter) holding several zeros are treated as
    // one multiple zero.
    double min_cell = 1e-6;
    double exclusion_radius = 1e-2;
    // Re-polish every root with r_match + delta and record the shift.
    bool stability_check = true;
};

// Number of zeros of D_l inside the region (minus exclusions), with multiplicity.
int count_zeros(const Sector& sector, const SearchRegion& region, const RadialPotential& V,
                const ResonanceOptions& opt = {});

struct ResonanceEntry {
    cplx zeta;
    int order = 1;              // zero order of D_l at zeta
    int l = 0;                  // channel
    long long m_l = 1;          // channel multiplicity
    bool eigenvalue = false;    // real zeta > n/2
    double lambda = 0.0;        // zeta (n - zeta) when eigenvalue
    bool probe = false;         // inside an exclusion disk (e.g. at n/2)
    bool strict = false;        // Newton met |ds| < 1e-10 and |D| < 1e-9 * boundary median
    double residual = 0.0;      // |D_l(zeta)| / median |D_l| on the cell boundary
    double rmatch_shift = 0.0;  // |zeta' - zeta| after re-polishing with a larger r_match

    long long multiplicity() const { return order * m_l; }
};

struct ResonanceList {
    int n = 0;
    std::vector<ResonanceEntry> entries;
    SearchRegion region;
    int L_max = 0;
    std::vector<int> channel_counts;  // zeros per channel, l = 0..L_max
    // True when the last channel searched has no zeros in the region, the
    // criterion used here for having covered every contributing channel.
    bool complete = false;
};

// All zeros of D_l, l <= L_max, in the region. L_max < 0 applies the
// centrifugal criterion at the region corner farthest from n/2. Entries are
// sorted by channel, then real part, then imaginary part.
ResonanceList find_resonances(const HyperbolicDim& dim, const RadialPotential& V, const SearchRegion& region,
                              int L_max = -1, const ResonanceOptions& opt = {});

// Sum over channels of m_l times the winding of D_l on |s - n/2| = radius.
long long critical_point_probe(const HyperbolicDim& dim, const RadialPotential& V, int L_max,
                               const ResonanceOptions& opt = {});

struct CountValue {
    long long count = 0;
    bool lower_bound_only = false;  // the disk is not fully covered by a complete search
};

// N_V(r) = number of listed zeta with |zeta - n/2| <= r, with multiplicity.
CountValue counting_function(const ResonanceList& list, double r);

// max N_V(r) / r^{n+1} over r in [r_min, r_max], r_max capped at the
// covered radius. Realizes the O(r^{n+1}) bound as a reported constant.
double counting_growth_constant(const ResonanceList& list, double r_min, double r_max);

}  // namespace hyperres
