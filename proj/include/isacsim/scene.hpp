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

// Planar scene geometry: the moving extended target (a rectangle), line-of-
// sight blockage behind it, and single-bounce mirror reflections off its four
// surfaces. All angles are global polar angles in [0, 2*pi); the geometry is
// strictly 2D.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "isacsim/rng.hpp"

namespace isacsim {

constexpr double kPi = 3.14159265358979323846;
// Propagation speed used for all delay/Doppler/wavelength conversions.
constexpr double kSpeedOfLight = 3.0e8;

// Maps any angle to [0, 2*pi).
double wrap_angle(double a);

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

inline Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
inline Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
inline Point2D operator*(double s, Point2D p) { return {s * p.x, s * p.y}; }
inline double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2D p) { return std::hypot(p.x, p.y); }
inline double distance(Point2D a, Point2D b) { return norm(b - a); }

// One side of the target rectangle. id is 1-based and stable across frames.
struct Surface {
    Point2D p_start;
    Point2D p_end;
    int id = 0;
};

// Pose of the extended target. heading is a unit vector; length runs along
// it, width across it.
struct TargetState {
    Point2D centroid;
    Point2D heading{1.0, 0.0};
    double speed = 0.0;  // m/s
    double length = 0.0; // m
    double width = 0.0;  // m
};

// array_axis is the ULA axis direction (global angle); broadside is
// array_axis + pi/2. Steering phases depend on angles relative to this axis.
struct AccessPoint {
    Point2D position;
    int n_tx = 1;
    int n_rx = 1;
    double tx_power = 1.0; // W
    double array_axis = 0.0;
};

struct UserEquipment {
    Point2D position;
    int n_ant = 1;
    double array_axis = 0.0;
};

// Half-open angular interval [a_low, a_high); when wraps is set the interval
// is [a_low, 2*pi) followed by [0, a_high).
struct AngularRange {
    double a_low = 0.0;
    double a_high = 0.0;
    bool wraps = false;
};

// Reflection behaviour shared by all four target surfaces. specular and
// diffuse are power fractions; phase_shift is applied on reflection;
// efficiency scales the total reflected power.
struct SurfaceReflectionProps {
    double phase_shift = kPi;
    double specular = 0.7;
    double diffuse = 0.2;
    double efficiency = 1.0;
};

// Static world description. Rosters hold the nodes actually simulated.
struct Scene {
    double room_size = 200.0; // square side, m
    std::vector<AccessPoint> aps;
    std::vector<UserEquipment> ues;
    SurfaceReflectionProps surface;
};

// The four sides of the target rectangle, traversed as a closed loop
// (adjacent surfaces share endpoints). Requires length > 0 and width > 0.
std::array<Surface, 4> target_surfaces(const TargetState& t);

// k i.i.d. points uniform over the target rectangle. Consumes exactly two
// uniform draws per point (along-heading first). A degenerate rectangle
// collapses every point onto the centroid.
std::vector<Point2D> scatterer_positions(const TargetState& t, int k, Rng& rng);

// Deterministic alternative layout: cell centers of the most-square r x c
// factorization of k (more cells along the longer side). The point-cloud mean
// is exactly the centroid.
std::vector<Point2D> scatterer_grid(const TargetState& t, int k);

// Polar angle of (target - observer) in [0, 2*pi). Throws std::domain_error
// on coincident points.
double angle_of(const Point2D& observer, const Point2D& target);

// Angular interval subtended by a surface at the observer: always the minor
// arc (< pi) between the endpoint directions, half-open toward the end of the
// counter-clockwise sweep. Throws std::domain_error when the observer lies on
// the surface segment.
AngularRange angular_range(const Surface& s, const Point2D& observer);

bool angular_contains(const AngularRange& r, double angle);

// Pure angular shadowing test: true when the direction ap->ue falls inside
// the angular interval of any target surface. Ignores whether the UE is in
// front of or behind the target; kept for comparisons against the
// distance-guarded test below.
bool los_blocked_angular(const Point2D& ap, const Point2D& ue, const TargetState& t);

// True iff the open segment a->b does not cross any target surface.
// Implemented as the angular test plus a distance guard: a direction inside a
// surface interval blocks only if the ray meets the surface before reaching b.
bool segment_clear_of_target(const Point2D& a, const Point2D& b, const TargetState& t);

bool los_exists(const AccessPoint& ap, const UserEquipment& ue, const TargetState& t);

// Reflection of p across the infinite line through s. Involution.
Point2D mirror_point(const Point2D& p, const Surface& s);

// Specular interaction point on surface s for the path ap -> s -> ue, found
// by intersecting ap->mirror(ue) with the segment. Present only when both
// endpoints lie strictly on the outer side of s (the side away from the
// target interior), the intersection falls on the segment, and neither leg
// crosses one of the other three surfaces.
std::optional<Point2D> reflection_point(const Point2D& ap, const Point2D& ue, const Surface& s,
                                        const TargetState& t);

} // namespace isacsim
