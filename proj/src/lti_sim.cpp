#include "ddc/lti_sim.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ddc {

namespace {

bool grid_aligned(double value, double step, long long* ratio) {
    const double raw = value / step;
    const long long rounded = std::llround(raw);
    if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, std::abs(raw))) return false;
    if (ratio) *ratio = rounded;
    return true;
}

Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
    const Eigen::Index n = a.rows();
    Matrix ctrb(n, n * b.cols());
    Matrix power = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        ctrb.block(0, k * b.cols(), n, b.cols()) = power;
        power = a * power;
    }
    return ctrb;
}

}  // namespace

void StatePlant::validate() const {
    if (A.rows() != A.cols()) throw std::invalid_argument("StatePlant: A must be square");
    if (B.rows() != A.rows()) throw std::invalid_argument("StatePlant: A and B row counts differ");
    if (!A.allFinite() || !B.allFinite()) throw std::invalid_argument("StatePlant: non-finite entries");
}

bool StatePlant::controllable() const {
    return numerical_rank(controllability_matrix(A, B)).rank == A.rows();
}

void OutputPlant::validate() const {
    if (A.rows() != A.cols()) throw std::invalid_argument("OutputPlant: A must be square");
    if (b.size() != A.rows() || c.size() != A.rows()) {
        throw std::invalid_argument("OutputPlant: b/c dimension mismatch");
    }
    if (!A.allFinite() || !b.allFinite() || !c.allFinite()) {
        throw std::invalid_argument("OutputPlant: non-finite entries");
    }
}

bool OutputPlant::controllable() const {
    return numerical_rank(controllability_matrix(A, b)).rank == A.rows();
}

bool OutputPlant::observable() const {
    return numerical_rank(controllability_matrix(A.transpose(), c)).rank == A.rows();
}

OutputPlant plant_from_transfer_function(const Vector& numerator, const Vector& denominator) {
    const Eigen::Index n = denominator.size() - 1;
    if (n < 1) throw std::invalid_argument("plant_from_transfer_function: denominator degree < 1");
    if (std::abs(denominator(n) - 1.0) > 1e-12) {
        throw std::invalid_argument("plant_from_transfer_function: denominator must be monic");
    }
    if (numerator.size() > n) {
        throw std::invalid_argument("plant_from_transfer_function: numerator degree too high");
    }
    OutputPlant plant;
    plant.A = Matrix::Zero(n, n);
    plant.A.block(0, 1, n - 1, n - 1).setIdentity();
    plant.A.row(n - 1) = -denominator.head(n).transpose();
    plant.b = Vector::Zero(n);
    plant.b(n - 1) = 1.0;
    plant.c = Vector::Zero(n);
    plant.c.head(numerator.size()) = numerator;
    return plant;
}

Vector SignalSpec::value_at(double t) const {
    Vector u(channel_count());
    for (int i = 0; i < channel_count(); ++i) {
        double value = channels[i].offset;
        for (const auto& term : channels[i].terms) {
            value += term.amplitude * std::sin(term.omega * t + term.phase);
        }
        u(i) = value;
    }
    return u;
}

void SignalSpec::validate() const {
    if (channels.empty()) throw std::invalid_argument("SignalSpec: no channels");
    for (const auto& ch : channels) {
        for (const auto& term : ch.terms) {
            if (term.omega < 0.0) throw std::invalid_argument("SignalSpec: negative frequency");
            if (!std::isfinite(term.amplitude) || !std::isfinite(term.phase)) {
                throw std::invalid_argument("SignalSpec: non-finite term");
            }
        }
    }
}

Exosystem build_exosystem(const SignalSpec& spec) {
    spec.validate();
    const int m = spec.channel_count();
    int dim = 0;
    for (const auto& ch : spec.channels) {
        dim += 2 * static_cast<int>(ch.terms.size());
        if (ch.offset != 0.0) dim += 1;
    }
    Exosystem exo;
    exo.S = Matrix::Zero(dim, dim);
    exo.w0 = Vector::Zero(dim);
    exo.output_map = Matrix::Zero(m, dim);
    int at = 0;
    for (int ch = 0; ch < m; ++ch) {
        for (const auto& term : spec.channels[ch].terms) {
            // d/dt (sin, cos)(w t + phi) rotation block
            exo.S(at, at + 1) = term.omega;
            exo.S(at + 1, at) = -term.omega;
            exo.w0(at) = std::sin(term.phase);
            exo.w0(at + 1) = std::cos(term.phase);
            exo.output_map(ch, at) = term.amplitude;
            at += 2;
        }
        if (spec.channels[ch].offset != 0.0) {
            exo.w0(at) = 1.0;
            exo.output_map(ch, at) = spec.channels[ch].offset;
            at += 1;
        }
    }
    return exo;
}

Matrix Trajectory::block_state(int block) const {
    const auto& [offset, dim] = spans.at(block);
    return state.middleRows(offset, dim);
}

Matrix Trajectory::block_deriv(int block) const {
    const auto& [offset, dim] = spans.at(block);
    return deriv.middleRows(offset, dim);
}

Trajectory simulate_cascade(const std::vector<LtiBlock>& blocks, const Exosystem& exo,
                            double horizon, double step) {
    if (step <= 0.0) throw std::invalid_argument("simulate_cascade: step must be positive");
    long long steps = 0;
    if (!grid_aligned(horizon, step, &steps) || steps < 0) {
        throw std::invalid_argument("simulate_cascade: horizon must be a multiple of the step");
    }

    const int exo_dim = exo.dim();
    const int m = static_cast<int>(exo.output_map.rows());

    std::vector<std::pair<int, int>> spans;
    int total = 0;
    for (const auto& block : blocks) {
        if (block.A.rows() != block.A.cols()) {
            throw std::invalid_argument("simulate_cascade: block A must be square");
        }
        if (block.B.rows() != block.A.rows() || block.x0.size() != block.A.rows()) {
            throw std::invalid_argument("simulate_cascade: block dimensions inconsistent");
        }
        spans.emplace_back(total, static_cast<int>(block.A.rows()));
        total += static_cast<int>(block.A.rows());
    }

    // Aggregate autonomous system over [exostate; block states].
    const int aggregate_dim = exo_dim + total;
    Matrix aggregate = Matrix::Zero(aggregate_dim, aggregate_dim);
    aggregate.topLeftCorner(exo_dim, exo_dim) = exo.S;
    Vector initial(aggregate_dim);
    initial.head(exo_dim) = exo.w0;
    for (size_t i = 0; i < blocks.size(); ++i) {
        const auto& block = blocks[i];
        const auto& [offset, dim] = spans[i];
        const int row = exo_dim + offset;
        aggregate.block(row, row, dim, dim) = block.A;
        if (block.B.cols() > 0) {
            if (block.from_input.rows() != block.B.cols() || block.from_input.cols() != m) {
                throw std::invalid_argument("simulate_cascade: from_input shape mismatch");
            }
            aggregate.block(row, 0, dim, exo_dim) += block.B * block.from_input * exo.output_map;
            for (const auto& [source, map] : block.from_blocks) {
                if (source < 0 || static_cast<size_t>(source) >= i) {
                    throw std::runtime_error(
                        "simulate_cascade: block input references a non-upstream block "
                        "(algebraic loop or bad index)");
                }
                const auto& [src_offset, src_dim] = spans[source];
                if (map.rows() != block.B.cols() || map.cols() != src_dim) {
                    throw std::invalid_argument("simulate_cascade: from_blocks map shape mismatch");
                }
                aggregate.block(row, exo_dim + src_offset, dim, src_dim) += block.B * map;
            }
        }
        initial.segment(row, dim) = block.x0;
    }

    const Matrix propagator = expm(aggregate * step);
    const int points = static_cast<int>(steps) + 1;

    Matrix full(aggregate_dim, points);
    full.col(0) = initial;
    for (int k = 1; k < points; ++k) full.col(k) = propagator * full.col(k - 1);
    const Matrix full_deriv = aggregate * full;

    Trajectory traj;
    traj.step = step;
    traj.times = Vector::LinSpaced(points, 0.0, step * (points - 1));
    traj.state = full.bottomRows(total);
    traj.deriv = full_deriv.bottomRows(total);
    traj.input = exo.output_map * full.topRows(exo_dim);
    traj.spans = std::move(spans);
    return traj;
}

Matrix sample(const Trajectory& traj, double Ts, int count, Signal which,
              int row_offset, int rows) {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    long long stride = 0;
    if (!grid_aligned(Ts, traj.step, &stride) || stride < 1) {
        std::ostringstream os;
        os << "sample: Ts = " << Ts << " is not a multiple of the grid step " << traj.step;
        throw std::runtime_error(os.str());
    }
    const long long last = stride * (count - 1);
    if (last >= traj.grid_points()) {
        throw std::runtime_error("sample: requested samples extend beyond the trajectory");
    }
    const Matrix& source = which == Signal::State ? traj.state
                         : which == Signal::Input ? traj.input
                                                  : traj.deriv;
    const int take = rows < 0 ? static_cast<int>(source.rows()) - row_offset : rows;
    Matrix out(take, count);
    for (int k = 0; k < count; ++k) {
        out.col(k) = source.block(row_offset, k * stride, take, 1);
    }
    return out;
}

void export_trajectory_csv(const Trajectory& traj, std::ostream& out,
                           const std::vector<std::string>& state_names,
                           const std::vector<std::string>& input_names) {
    if (static_cast<Eigen::Index>(state_names.size()) != traj.state.rows() ||
        static_cast<Eigen::Index>(input_names.size()) != traj.input.rows()) {
        throw std::invalid_argument("export_trajectory_csv: name count mismatch");
    }
    out << "t";
    for (const auto& name : state_names) out << ',' << name;
    for (const auto& name : input_names) out << ',' << name;
    for (const auto& name : state_names) out << ",d" << name;
    out << '\n';
    char buf[32];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    };
    for (int k = 0; k < traj.grid_points(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", traj.times(k));
        out << buf;
        for (Eigen::Index r = 0; r < traj.state.rows(); ++r) emit(traj.state(r, k));
        for (Eigen::Index r = 0; r < traj.input.rows(); ++r) emit(traj.input(r, k));
        for (Eigen::Index r = 0; r < traj.deriv.rows(); ++r) emit(traj.deriv(r, k));
        out << '\n';
    }
}

}  // namespace ddc
