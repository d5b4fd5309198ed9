// Copyright 2026 The clickcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clickcert/cluster_model.h"

#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "clickcert/errors.h"
#include "clickcert/format.h"

namespace clickcert {
namespace {

constexpr std::uint64_t kScanLimit = 100'000'000;
constexpr int kRisingSteps = 8;

void require_args(std::uint64_t emitters, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw InvalidParameter("efficiency " + format_double(eta) + " outside [0, 1]");
    }
    if (emitters < 1) {
        throw InvalidParameter("emitter count must be at least 1");
    }
}

// base^M - y^(k M) with u = y^k and gap = base - u supplied exactly, so the
// ratio base / u = 1 + gap / u keeps its low digits: u^M expm1(M log1p(gap / u)).
double power_gap(std::uint64_t m, double u, double gap) {
    const double mm = static_cast<double>(m);
    const double b = mm * std::log(u);
    return std::exp(b) * std::expm1(mm * std::log1p(gap / u));
}

template <typename Model>
std::pair<std::uint64_t, double> scan(double eta, Model model) {
    std::uint64_t best_m = 1;
    double best = model(1, eta);
    double previous = best;
    int rising = 0;
    for (std::uint64_t m = 2; m <= kScanLimit; ++m) {
        double v = model(m, eta);
        if (v < best) {
            best = v;
            best_m = m;
            rising = 0;
        } else if (v > previous) {
            if (++rising >= kRisingSteps) {
                return {best_m, best};
            }
        } else {
            rising = 0;
        }
        previous = v;
    }
    throw InvalidParameter("no minimum found below " + std::to_string(kScanLimit) + " emitters");
}

}  // namespace

double cov_model(std::uint64_t emitters, double eta) {
    require_args(emitters, eta);
    const double x = eta / 4.0;
    const double y = 1.0 - x;
    return power_gap(emitters, y * y, -x * x);
}

double full_model(std::uint64_t emitters, double eta) {
    require_args(emitters, eta);
    const double x = eta / 4.0;
    const double y2 = (1.0 - x) * (1.0 - x);
    return power_gap(emitters, y2 * y2, -x * x * (6.0 - 4.0 * x + x * x));
}

ClusterCurve sweep(double eta, std::uint64_t max_emitters) {
    require_args(1, eta);
    if (max_emitters < 1 || max_emitters > kMaxSweepEmitters) {
        throw InvalidParameter("sweep length must lie in [1, " + std::to_string(kMaxSweepEmitters) + "]");
    }
    ClusterCurve curve;
    curve.eta = eta;
    curve.points.reserve(max_emitters);
    for (std::uint64_t m = 1; m <= max_emitters; ++m) {
        curve.points.push_back({m, cov_model(m, eta), full_model(m, eta)});
    }
    return curve;
}

ClusterMinimum find_min(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw InvalidParameter("minimum search needs efficiency in (0, 1], got " + format_double(eta));
    }
    ClusterMinimum out;
    std::tie(out.full_emitters, out.full_value) = scan(eta, full_model);
    std::tie(out.cov_emitters, out.cov_value) = scan(eta, cov_model);
    return out;
}

}  // namespace clickcert
