#include "ddc/batching.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ddc {

namespace {

using nlohmann::json;

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_from_json(const json& arr) {
    Vector v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

json read_meta(const std::filesystem::path& dir) {
    std::ifstream in(dir / "meta.json");
    if (!in) throw std::runtime_error("batch load: cannot open " + (dir / "meta.json").string());
    json meta;
    in >> meta;
    return meta;
}

}  // namespace

StateBatch build_state_batch(const Trajectory& filter_traj, const StateFilterParams& params,
                             const Vector& x0, double Ts, int count) {
    params.validate();
    if (filter_traj.spans.size() != 2) {
        throw std::invalid_argument("build_state_batch: expected a plant+filter trajectory");
    }
    const auto& [filter_offset, filter_dim] = filter_traj.spans[1];
    StateBatch batch;
    batch.U = sample(filter_traj, Ts, count, Signal::Input);
    batch.Z = sample(filter_traj, Ts, count, Signal::State, filter_offset, filter_dim);
    batch.Zdot = sample(filter_traj, Ts, count, Signal::Derivative, filter_offset, filter_dim);
    batch.E = error_batch(x0, params.lambda, Ts, count);
    batch.Ts = Ts;
    batch.lambda = params.lambda;
    batch.gamma = params.gamma;
    batch.x0 = x0;
    return batch;
}

OutputBatch build_output_batch(const Trajectory& filter_traj, const Trajectory& chi_traj,
                               const OutputFilterParams& params, double Ts, int count) {
    params.validate();
    if (filter_traj.spans.size() != 2) {
        throw std::invalid_argument("build_output_batch: expected a plant+filter trajectory");
    }
    const int n = params.order();
    const auto& [filter_offset, filter_dim] = filter_traj.spans[1];
    if (filter_dim != 2 * n) {
        throw std::invalid_argument("build_output_batch: filter dimension mismatch");
    }
    const Matrix chi = sample(chi_traj, Ts, count, Signal::State);
    const Matrix chi_dot = sample(chi_traj, Ts, count, Signal::Derivative);
    const Matrix zeta = sample(filter_traj, Ts, count, Signal::State, filter_offset, filter_dim);
    const Matrix zeta_dot =
        sample(filter_traj, Ts, count, Signal::Derivative, filter_offset, filter_dim);

    OutputBatch batch;
    batch.U = sample(filter_traj, Ts, count, Signal::Input);
    batch.Za.resize(3 * n, count);
    batch.Za << chi, zeta;
    batch.Zadot.resize(3 * n, count);
    batch.Zadot << chi_dot, zeta_dot;
    batch.Ts = Ts;
    batch.lambdas = params.lambdas;
    batch.gammas = params.gammas;
    return batch;
}

BaselineBatch build_baseline_batch(const Trajectory& plant_traj, double Ts, int count) {
    const auto& [offset, dim] = plant_traj.spans.at(0);
    BaselineBatch batch;
    batch.U = sample(plant_traj, Ts, count, Signal::Input);
    batch.X = sample(plant_traj, Ts, count, Signal::State, offset, dim);
    batch.Xdot = sample(plant_traj, Ts, count, Signal::Derivative, offset, dim);
    batch.Ts = Ts;
    return batch;
}

namespace {

ExcitationReport excitation_from_stack(const Matrix& stack, int required, int recommended) {
    const RankResult rank = numerical_rank(stack);
    ExcitationReport report;
    report.required_rank = required;
    report.achieved_rank = static_cast<int>(rank.rank);
    report.smallest_singular_value =
        rank.rank > 0 ? rank.singular_values(rank.rank - 1) : 0.0;
    report.recommended_N = recommended;
    return report;
}

}  // namespace

ExcitationReport check_excitation_state(const StateBatch& batch) {
    Matrix stack(batch.Z.rows() + batch.U.rows(), batch.N());
    stack << batch.Z, batch.U;
    return excitation_from_stack(stack, batch.n() + 2 * batch.m(), batch.n() + 2 * batch.m());
}

ExcitationReport check_excitation_output(const OutputBatch& batch, int sinusoid_count) {
    Matrix stack(batch.Za.rows() + 1, batch.N());
    stack << batch.Za, batch.U;
    return excitation_from_stack(stack, 3 * batch.n() + 1, batch.n() + 2 * sinusoid_count);
}

double gramian_mu(const Trajectory& filter_traj) {
    if (filter_traj.spans.size() != 2) {
        throw std::invalid_argument("gramian_mu: expected a plant+filter trajectory");
    }
    const auto& [offset, dim] = filter_traj.spans[1];
    const int m = static_cast<int>(filter_traj.input.rows());
    const int size = dim + m;
    Matrix gramian = Matrix::Zero(size, size);
    Vector v(size);
    for (int k = 0; k < filter_traj.grid_points(); ++k) {
        v.head(dim) = filter_traj.state.block(offset, k, dim, 1);
        v.tail(m) = filter_traj.input.col(k);
        const double weight =
            (k == 0 || k == filter_traj.grid_points() - 1) ? 0.5 : 1.0;   // trapezoid
        gramian.noalias() += (weight * filter_traj.step) * v * v.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gramian);
    return solver.eigenvalues().minCoeff();
}

void save_matrix_csv(const Matrix& m, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("save_matrix_csv: cannot open " + file.string());
    char buf[32];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
}

Matrix load_matrix_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("load_matrix_csv: cannot open " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error("load_matrix_csv: ragged rows in " + file.string());
        }
        rows.push_back(std::move(row));
    }
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (size_t r = 0; r < rows.size(); ++r) {
        for (size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

void save_state_batch(const StateBatch& batch, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_matrix_csv(batch.U, dir / "U.csv");
    save_matrix_csv(batch.Z, dir / "Z.csv");
    save_matrix_csv(batch.Zdot, dir / "Zdot.csv");
    save_matrix_csv(batch.E, dir / "E.csv");
    json meta = {{"type", "state"},   {"n", batch.n()},         {"m", batch.m()},
                 {"N", batch.N()},    {"Ts", batch.Ts},         {"lambda", batch.lambda},
                 {"gamma", batch.gamma}, {"x0", vector_to_json(batch.x0)}};
    std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';
}

StateBatch load_state_batch(const std::filesystem::path& dir) {
    const json meta = read_meta(dir);
    if (meta.at("type") != "state") throw std::runtime_error("load_state_batch: not a state batch");
    StateBatch batch;
    batch.U = load_matrix_csv(dir / "U.csv");
    batch.Z = load_matrix_csv(dir / "Z.csv");
    batch.Zdot = load_matrix_csv(dir / "Zdot.csv");
    batch.E = load_matrix_csv(dir / "E.csv");
    batch.Ts = meta.at("Ts").get<double>();
    batch.lambda = meta.at("lambda").get<double>();
    batch.gamma = meta.at("gamma").get<double>();
    batch.x0 = vector_from_json(meta.at("x0"));
    if (batch.Z.cols() != batch.U.cols() || batch.Zdot.cols() != batch.U.cols() ||
        batch.E.cols() != batch.U.cols()) {
        throw std::runtime_error("load_state_batch: column counts differ");
    }
    return batch;
}

void save_output_batch(const OutputBatch& batch, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_matrix_csv(batch.U, dir / "U.csv");
    save_matrix_csv(batch.Za, dir / "Za.csv");
    save_matrix_csv(batch.Zadot, dir / "Zadot.csv");
    json meta = {{"type", "output"},
                 {"n", batch.n()},
                 {"N", batch.N()},
                 {"Ts", batch.Ts},
                 {"lambdas", vector_to_json(batch.lambdas)},
                 {"gammas", vector_to_json(batch.gammas)}};
    std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';
}

OutputBatch load_output_batch(const std::filesystem::path& dir) {
    const json meta = read_meta(dir);
    if (meta.at("type") != "output") {
        throw std::runtime_error("load_output_batch: not an output batch");
    }
    OutputBatch batch;
    batch.U = load_matrix_csv(dir / "U.csv");
    batch.Za = load_matrix_csv(dir / "Za.csv");
    batch.Zadot = load_matrix_csv(dir / "Zadot.csv");
    batch.Ts = meta.at("Ts").get<double>();
    batch.lambdas = vector_from_json(meta.at("lambdas"));
    batch.gammas = vector_from_json(meta.at("gammas"));
    if (batch.Za.cols() != batch.U.cols() || batch.Zadot.cols() != batch.U.cols()) {
        throw std::runtime_error("load_output_batch: column counts differ");
    }
    return batch;
}

std::string batch_kind(const std::filesystem::path& dir) {
    return read_meta(dir).at("type").get<std::string>();
}

}  // namespace ddc
