// SPDX-License-Identifier: Apache-2.0
//
// isacsim - deterministic link-level simulator for sensing-assisted distributed MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "isacsim/scene.hpp"

#include <stdexcept>

namespace isacsim {

double wrap_angle(double a) {
    double w = std::fmod(a, 2.0 * kPi);
    if (w < 0.0)
        w += 2.0 * kPi;
    // fmod of a tiny negative can round back up to exactly 2*pi.
    if (w >= 2.0 * kPi)
        w = 0.0;
    return w;
}

std::array<Surface, 4> target_surfaces(const TargetState& t) {
    if (!(t.length > 0.0) || !(t.width > 0.0))
        throw std::domain_error("target_surfaces: target has no extent");
    const Point2D u = t.heading;            // along length
    const Point2D v{-u.y, u.x};             // along width, 90 deg CCW
    const double hl = 0.5 * t.length;
    const double hw = 0.5 * t.width;
    const Point2D c1 = t.centroid + hl * u + hw * v;
    const Point2D c2 = t.centroid - hl * u + hw * v;
    const Point2D c3 = t.centroid - hl * u - hw * v;
    const Point2D c4 = t.centroid + hl * u - hw * v;
    return {Surface{c1, c2, 1}, Surface{c2, c3, 2}, Surface{c3, c4, 3}, Surface{c4, c1, 4}};
}

std::vector<Point2D> scatterer_positions(const TargetState& t, int k, Rng& rng) {
    std::vector<Point2D> pts;
    pts.reserve(static_cast<std::size_t>(k));
    const Point2D u = t.heading;
    const Point2D v{-u.y, u.x};
    for (int i = 0; i < k; ++i) {
        const double a = (rng.uniform() - 0.5) * t.length;
        const double b = (rng.uniform() - 0.5) * t.width;
        pts.push_back(t.centroid + a * u + b * v);
    }
    return pts;
}

std::vector<Point2D> scatterer_grid(const TargetState& t, int k) {
    // Most-square factorization k = a*b with a >= b; a cells go along the
    // longer target dimension.
    int b = 1;
    for (int d = 1; d * d <= k; ++d)
        if (k % d == 0)
            b = d;
    const int a = k / b;
    const int n_len = t.length >= t.width ? a : b;
    const int n_wid = t.length >= t.width ? b : a;

    const Point2D u = t.heading;
    const Point2D v{-u.y, u.x};
    std::vector<Point2D> pts;
    pts.reserve(static_cast<std::size_t>(k));
    for (int wi = 0; wi < n_wid; ++wi) {
        const double q = ((wi + 0.5) / n_wid - 0.5) * t.width;
        for (int li = 0; li < n_len; ++li) {
            const double p = ((li + 0.5) / n_len - 0.5) * t.length;
            pts.push_back(t.centroid + p * u + q * v);
        }
    }
    return pts;
}

double angle_of(const Point2D& observer, const Point2D& target) {
    const double dx = target.x - observer.x;
    const double dy = target.y - observer.y;
    if (dx == 0.0 && dy == 0.0)
        throw std::domain_error("angle_of: coincident points");
    return wrap_angle(std::atan2(dy, dx));
}

AngularRange angular_range(const Surface& s, const Point2D& observer) {
    const double t1 = angle_of(observer, s.p_start);
    const double t2 = angle_of(observer, s.p_end);
    const double ccw = wrap_angle(t2 - t1);
    // ccw == pi exactly means the observer sits between the endpoints on the
    // segment itself; the subtended arc is undefined there.
    if (std::abs(ccw - kPi) < 1e-12)
        throw std::domain_error("angular_range: observer on the surface segment");
    AngularRange r;
    if (ccw < kPi) {
        r.a_low = t1;
        r.a_high = t2;
    } else {
        r.a_low = t2;
        r.a_high = t1;
    }
    r.wraps = r.a_low > r.a_high;
    return r;
}

bool angular_contains(const AngularRange& r, double angle) {
    const double a = wrap_angle(angle);
    if (r.wraps)
        return a >= r.a_low || a < r.a_high;
    return a >= r.a_low && a < r.a_high;
}

namespace {

// Distance along the ray (origin, direction theta) to segment s, if hit.
std::optional<double> ray_segment_hit(const Point2D& origin, double theta, const Surface& s) {
    const Point2D u{std::cos(theta), std::sin(theta)};
    const Point2D e = s.p_end - s.p_start;
    const Point2D w = s.p_start - origin;
    const double denom = cross(u, e);
    if (std::abs(denom) < 1e-15)
        return std::nullopt; // ray parallel to the surface
    const double t = cross(w, e) / denom;
    const double sv = cross(w, u) / denom;
    if (t >= 0.0 && sv >= 0.0 && sv <= 1.0)
        return t;
    return std::nullopt;
}

// Proper crossing test for a leg of a reflected path: an intersection counts
// only if it falls strictly inside the leg, so legs that merely start or end
// on a surface (the interaction point itself, shared corners) do not count.
bool leg_crosses_surface(const Point2D& a, const Point2D& b, const Surface& s) {
    const Point2D d = b - a;
    const Point2D e = s.p_end - s.p_start;
    const Point2D w = s.p_start - a;
    const double denom = cross(d, e);
    if (std::abs(denom) < 1e-15)
        return false;
    const double t = cross(w, e) / denom;
    const double sv = cross(w, d) / denom;
    return t > 1e-9 && t < 1.0 - 1e-9 && sv >= -1e-9 && sv <= 1.0 + 1e-9;
}

} // namespace

bool los_blocked_angular(const Point2D& ap, const Point2D& ue, const TargetState& t) {
    const double theta = angle_of(ap, ue);
    for (const Surface& s : target_surfaces(t))
        if (angular_contains(angular_range(s, ap), theta))
            return true;
    return false;
}

bool segment_clear_of_target(const Point2D& a, const Point2D& b, const TargetState& t) {
    if (!(t.length > 0.0) || !(t.width > 0.0))
        return true; // no physical extent, nothing to hit
    const double d_ab = distance(a, b);
    const double theta = angle_of(a, b);
    for (const Surface& s : target_surfaces(t)) {
        if (!angular_contains(angular_range(s, a), theta))
            continue;
        // Inside the surface's angular interval the ray meets the segment;
        // it shadows b only if the hit lies in front of b.
        const auto hit = ray_segment_hit(a, theta, s);
        if (hit && *hit < d_ab)
            return false;
    }
    return true;
}

bool los_exists(const AccessPoint& ap, const UserEquipment& ue, const TargetState& t) {
    return segment_clear_of_target(ap.position, ue.position, t);
}

Point2D mirror_point(const Point2D& p, const Surface& s) {
    const Point2D d = s.p_end - s.p_start;
    const double l2 = dot(d, d);
    if (l2 == 0.0)
        throw std::domain_error("mirror_point: degenerate surface");
    const double tproj = dot(p - s.p_start, d) / l2;
    const Point2D proj = s.p_start + tproj * d;
    return 2.0 * proj - p;
}

std::optional<Point2D> reflection_point(const Point2D& ap, const Point2D& ue, const Surface& s,
                                        const TargetState& t) {
    const Point2D e = s.p_end - s.p_start;
    const double side_ap = cross(e, ap - s.p_start);
    const double side_ue = cross(e, ue - s.p_start);
    const double side_in = cross(e, t.centroid - s.p_start);
    // Both endpoints must face the surface from outside the target.
    if (!(side_ap * side_in < 0.0) || !(side_ue * side_in < 0.0))
        return std::nullopt;

    const Point2D ue_m = mirror_point(ue, s);
    const Point2D d = ue_m - ap;
    const Point2D w = s.p_start - ap;
    const double denom = cross(d, e);
    if (std::abs(denom) < 1e-15)
        return std::nullopt;
    const double tv = cross(w, e) / denom; // along ap -> mirrored ue
    const double sv = cross(w, d) / denom; // along the surface
    if (tv < 0.0 || tv > 1.0 || sv < 0.0 || sv > 1.0)
        return std::nullopt;
    const Point2D p = s.p_start + sv * e;

    for (const Surface& other : target_surfaces(t)) {
        if (other.id == s.id)
            continue;
        if (leg_crosses_surface(ap, p, other) || leg_crosses_surface(p, ue, other))
            return std::nullopt;
    }
    return p;
}

} // namespace isacsim
