#include "chedra/error.hpp"
#include "chedra/validation.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace chedra {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

Mat3 rot(const Vec3& axis, double angle) { return Eigen::AngleAxisd(angle, axis).toRotationMatrix(); }

// Grid positions of the central vertices V0..V3 and, at each, the outward
// neighbours along the edges S_{i-1}|K_i (ha) and K_i|S_i (hb).
constexpr std::array<std::array<int, 2>, 4> kCentral{{{1, 1}, {1, 2}, {2, 2}, {2, 1}}};
constexpr std::array<std::array<int, 2>, 4> kHingeA{{{1, 0}, {0, 2}, {2, 3}, {3, 1}}};
constexpr std::array<std::array<int, 2>, 4> kHingeB{{{0, 1}, {1, 3}, {3, 2}, {2, 0}}};

constexpr double kDriveSpan = 0.05;
constexpr double kDriveStep = 0.0025;
constexpr int kMaxIterations = 100;

// Spherical linkage at one interior vertex: the incoming side panel has turned
// by theta_in about its hinge; find the corner-panel turn psi and the outgoing
// side-panel turn theta_out so that the shared edge hb matches.
struct VertexLink {
  Vec3 c_in;   // unit direction of the incoming central hinge
  Vec3 c_out;  // unit direction of the outgoing central hinge
  Vec3 a;      // unit direction of ha
  Vec3 n;      // unit direction of hb
};

struct VertexSolve {
  double psi = 0.0;
  double theta = 0.0;
  bool ok = false;
};

VertexSolve solve_vertex(const VertexLink& L, double theta_in, double psi0, double theta0) {
  const Mat3 R1 = rot(L.c_in, theta_in);
  auto residual = [&](double psi, double theta) -> Vec3 {
    return R1 * (rot(L.a, psi) * L.n) - rot(L.c_out, theta) * L.n;
  };
  VertexSolve s{psi0, theta0, false};
  Vec3 r = residual(s.psi, s.theta);
  for (int it = 0; it < kMaxIterations; ++it) {
    if (r.norm() < 1e-14) {
      s.ok = true;
      return s;
    }
    Eigen::Matrix<double, 3, 2> J;
    J.col(0) = R1 * L.a.cross(rot(L.a, s.psi) * L.n);
    J.col(1) = -L.c_out.cross(rot(L.c_out, s.theta) * L.n);
    const Eigen::Matrix2d N = J.transpose() * J;
    if (std::abs(N.determinant()) < 1e-300) return s;
    const Eigen::Vector2d step = N.ldlt().solve(-J.transpose() * r);
    // damped update: halve the step until the residual decreases
    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      const Vec3 trial = residual(s.psi + lambda * step(0), s.theta + lambda * step(1));
      if (trial.norm() < r.norm()) {
        s.psi += lambda * step(0);
        s.theta += lambda * step(1);
        r = trial;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      s.ok = r.norm() < 1e-12;
      return s;
    }
  }
  s.ok = r.norm() < 1e-12;
  return s;
}

}  // namespace

OracleResult kokotsakis_oracle(const Complex3x3& c, const Tolerances& tol) {
  OracleResult out;
  auto P = [&](const std::array<int, 2>& rc) -> Vec3 { return c.at(rc[0], rc[1]); };

  double max_defect = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) {
      max_defect = std::max(max_defect,
                            quad_planarity_defect(c.at(r, k), c.at(r, k + 1), c.at(r + 1, k + 1), c.at(r + 1, k)));
    }
  }
  if (max_defect > 1e-8) out.diagnostic = "input quads not planar (defect " + std::to_string(max_defect) + "); ";

  // Central hinge i runs from V_i to V_{i+1}.
  std::array<Vec3, 4> hinge;
  for (int i = 0; i < 4; ++i) {
    const Vec3 e = P(kCentral[(i + 1) % 4]) - P(kCentral[i]);
    if (!(e.norm() > 0.0)) {
      out.diagnostic += "degenerate central quad";
      return out;
    }
    hinge[static_cast<std::size_t>(i)] = e.normalized();
  }
  std::array<VertexLink, 4> links;
  for (int i = 0; i < 4; ++i) {
    const std::size_t u = static_cast<std::size_t>(i);
    const Vec3 a = P(kHingeA[u]) - P(kCentral[u]);
    const Vec3 n = P(kHingeB[u]) - P(kCentral[u]);
    if (!(a.norm() > 0.0) || !(n.norm() > 0.0)) {
      out.diagnostic += "degenerate outer edge at V" + std::to_string(i);
      return out;
    }
    links[u] = {hinge[(u + 3) % 4], hinge[u], a.normalized(), n.normalized()};
  }

  const int d = ((c.driving_hinge % 4) + 4) % 4;

  // Pose of the loop at one drive value: corner turns psi and side turns
  // theta per vertex; theta[d] holds the closing value computed at V_d.
  struct Loop {
    double drive = 0.0;
    std::array<double, 4> psi{};
    std::array<double, 4> theta{};
  };
  auto solve_loop = [&](double drive, const Loop& guess, Loop& out_loop) {
    out_loop.drive = drive;
    double theta_in = drive;
    for (int step = 1; step <= 4; ++step) {
      const std::size_t v = static_cast<std::size_t>((d + step) % 4);
      const VertexSolve s = solve_vertex(links[v], theta_in, guess.psi[v], guess.theta[v]);
      if (!s.ok) return false;
      out_loop.psi[v] = s.psi;
      out_loop.theta[v] = s.theta;
      theta_in = s.theta;
    }
    return true;
  };
  auto record = [&](const Loop& l, OracleSample& sample) {
    sample.drive = l.drive;
    for (std::size_t v = 0; v < 4; ++v) sample.folds[v] = l.theta[v];
    sample.folds[static_cast<std::size_t>(d)] = l.drive;
    sample.residual = l.theta[static_cast<std::size_t>(d)] - l.drive;
    sample.solved = true;
  };

  const int half = static_cast<int>(std::lround(kDriveSpan / kDriveStep));
  std::vector<OracleSample> samples(static_cast<std::size_t>(2 * half + 1));
  for (int k = -half; k <= half; ++k) samples[static_cast<std::size_t>(half + k)].drive = k * kDriveStep;
  record(Loop{}, samples[static_cast<std::size_t>(half)]);

  // Path following in each direction: secant predictor, corrector, and step
  // halving whenever the corrector lands too far from the prediction (a jump
  // to another assembly of some vertex).
  for (int dir : {1, -1}) {
    Loop prev, prev2;
    bool have_prev2 = false;
    double h = 1e-5;  // tiny first step: no secant is available yet
    bool failed = false;
    for (int k = 1; k <= half && !failed; ++k) {
      const double target = dir * k * kDriveStep;
      while (std::abs(target - prev.drive) > 1e-15) {
        const double hh = dir * std::min(h, std::abs(target - prev.drive));
        Loop guess = prev;
        if (have_prev2) {
          const double ratio = hh / (prev.drive - prev2.drive);
          for (std::size_t v = 0; v < 4; ++v) {
            guess.psi[v] += ratio * (prev.psi[v] - prev2.psi[v]);
            guess.theta[v] += ratio * (prev.theta[v] - prev2.theta[v]);
          }
        }
        Loop next;
        bool ok = solve_loop(prev.drive + hh, guess, next);
        if (ok && have_prev2) {
          double corr = 0.0;
          for (std::size_t v = 0; v < 4; ++v) {
            corr = std::max({corr, std::abs(next.psi[v] - guess.psi[v]), std::abs(next.theta[v] - guess.theta[v])});
          }
          ok = corr <= 0.1 * std::abs(hh) + 1e-12;
        }
        if (!ok) {
          h *= 0.5;
          if (h < 1e-9) {
            failed = true;
            out.diagnostic += "vertex solve diverged at drive " + std::to_string(prev.drive + hh) + "; ";
            break;
          }
          continue;
        }
        prev2 = prev;
        have_prev2 = true;
        prev = next;
        h = std::min(2.0 * h, kDriveStep / 4.0);
      }
      if (!failed) record(prev, samples[static_cast<std::size_t>(half + dir * k)]);
    }
  }

  auto closes = [&](const OracleSample& s) { return s.solved && std::abs(s.residual) < tol.closure; };
  int lo = half, hi = half;
  if (closes(samples[static_cast<std::size_t>(half)])) {
    while (lo > 0 && closes(samples[static_cast<std::size_t>(lo - 1)])) --lo;
    while (hi < 2 * half && closes(samples[static_cast<std::size_t>(hi + 1)])) ++hi;
    out.witness_length = (hi - lo) * kDriveStep;
    for (int k = lo; k <= hi; ++k) {
      out.max_residual_in_run = std::max(out.max_residual_in_run, std::abs(samples[static_cast<std::size_t>(k)].residual));
    }
  }
  out.flexible = out.witness_length >= tol.witness * (1.0 - 1e-9);
  out.samples = std::move(samples);
  return out;
}

CrossValidation cross_validate(const LinkageSpec& spec, const Boundary& boundary, int sweep, const Tolerances& tol) {
  CrossValidation cv;
  try {
    cv.theorem = classify(spec, tol);
  } catch (const Error& e) {
    cv.theorem = Classification{};
    cv.theorem.reason = e.what();
    cv.notes.push_back(std::string("classify: ") + e.what());
  }

  ConeNet net;
  try {
    net = build_patch(spec, boundary);
    cv.built = true;
  } catch (const Error& e) {
    cv.notes.push_back(std::string("build: ") + e.what());
    cv.agree = !cv.theorem.flexible();
    return cv;
  }

  // The geometry realizes |S3 B_j| on its own; flag declared u_j it ignores.
  const double s3 = net.tips[2].z();
  for (std::size_t j = 0; j < net.vertices.cols(); ++j) {
    const double declared = j == 0 ? spec.initial.u : spec.others[j - 1].u;
    const double realized = (net.vertices.at(2, j) - Point3(0.0, 0.0, s3)).norm();
    if (std::abs(realized - declared) > 1e-9 * std::max(1.0, declared)) {
      cv.notes.push_back("column " + std::to_string(j) + ": declared u differs from realized |S3 B|");
    }
  }

  const ValidationReport ref_plan = check_planarity(net.vertices, tol);
  const std::vector<Point3> ref_tips = tip_points(net);
  cv.max_planarity = ref_plan.max_planarity;
  cv.max_collinearity = check_tip_collinearity(ref_tips, tol).max_collinearity;

  if (cv.theorem.flexible() && sweep > 0) {
    try {
      const auto range = interval_containing(net_flexion_range(net, tol), spec.a_ref);
      if (!range) {
        cv.notes.push_back("a_ref outside the net flexion range");
      } else {
        for (int i = 0; i < sweep; ++i) {
          const double a = range->lo + (range->hi - range->lo) * (i + 0.5) / sweep;
          const FlexionState st = flex(net, a, tol);
          const ValidationReport rep = validate_state(net, st, tol);
          cv.max_isometry = std::max(cv.max_isometry, rep.max_isometry);
          cv.max_planarity = std::max(cv.max_planarity, rep.max_planarity);
          cv.max_collinearity = std::max(cv.max_collinearity, rep.max_collinearity);
        }
      }
    } catch (const Error& e) {
      cv.notes.push_back(std::string("sweep: ") + e.what());
    }
  }

  for (std::size_t col = 0; col + 4 <= net.vertices.cols(); ++col) {
    for (std::size_t row = 0; row + 4 <= net.vertices.rows(); ++row) {
      const OracleResult r = kokotsakis_oracle(extract_block(net.vertices, row, col), tol);
      cv.blocks.push_back({col, r.flexible, r.witness_length});
      if (!r.diagnostic.empty()) cv.notes.push_back("block " + std::to_string(col) + ": " + r.diagnostic);
    }
  }
  cv.oracle_flexible = !cv.blocks.empty() &&
                       std::all_of(cv.blocks.begin(), cv.blocks.end(), [](const BlockVerdict& b) { return b.flexible; });
  cv.agree = cv.blocks.empty() || cv.theorem.flexible() == cv.oracle_flexible;
  if (cv.theorem.flexible() && cv.max_isometry >= tol.isometry) {
    cv.notes.push_back("sweep isometry defect above tolerance");
  }
  return cv;
}

}  // namespace chedra
