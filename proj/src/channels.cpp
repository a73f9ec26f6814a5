// Copyright 2026 The QHL Authors
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

#include "qhl/channels.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qhl/errors.hpp"
#include "qhl/io.hpp"

namespace qhl {

namespace {

Eigen::Index exact_sqrt(Eigen::Index n) {
    auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (r * r != n) {
        throw Error(ErrorKind::NonSquareLength, "length " + std::to_string(n) + " is not a perfect square");
    }
    return r;
}

ComplexVector vec_identity(Eigen::Index dim) {
    return vec(ComplexMatrix::Identity(dim, dim));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view token, size_t line, size_t column) {
    std::string_view t = trim(token);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ParseError("expected a number, found '" + std::string(t) + "'", line, column);
    }
    return value;
}

long parse_int(std::string_view token, size_t line, size_t column) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || value <= 0) {
        throw ParseError("expected a positive integer, found '" + std::string(token) + "'", line, column);
    }
    return value;
}

}  // namespace

Superoperator::Superoperator(ComplexMatrix matrix, bool trace_preserving, bool completely_positive)
    : matrix_(std::move(matrix)), trace_preserving_(trace_preserving), completely_positive_(completely_positive) {
    hilbert_in_ = exact_sqrt(matrix_.cols());
    hilbert_out_ = exact_sqrt(matrix_.rows());
}

ComplexVector vec(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "vec expects a square matrix");
    }
    ComplexVector out(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out[i * m.cols() + j] = m(i, j);
        }
    }
    return out;
}

ComplexMatrix unvec(const ComplexVector &v) {
    Eigen::Index dim = exact_sqrt(v.size());
    ComplexMatrix out(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            out(i, j) = v[i * dim + j];
        }
    }
    return out;
}

Superoperator compose(const Superoperator &outer, const Superoperator &inner) {
    if (outer.dim_in() != inner.dim_out()) {
        throw Error(ErrorKind::DimensionMismatch, "superoperator composition dimensions differ");
    }
    return Superoperator(outer.matrix() * inner.matrix(), outer.trace_preserving() && inner.trace_preserving(),
                         outer.completely_positive() && inner.completely_positive());
}

ComplexMatrix apply(const Superoperator &s, const ComplexMatrix &rho) {
    if (rho.size() != s.dim_in()) {
        throw Error(ErrorKind::DimensionMismatch, "operator does not match superoperator input dimension");
    }
    return unvec(s.matrix() * vec(rho));
}

Superoperator left_right_superop(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols() != b.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "A·M·B needs cols(A) == rows(B)");
    }
    if (a.rows() != b.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "A·M·B must map square operators to square operators");
    }
    return Superoperator(kron(a, b.transpose()));
}

Superoperator unitary_superop(const ComplexMatrix &u) {
    return Superoperator(kron(u, u.conjugate()), true, true);
}

Superoperator prep_superop() {
    ComplexMatrix m = ComplexMatrix::Zero(16, 4);
    m(0, 0) = 1.0;
    m(2, 1) = 1.0;
    m(8, 2) = 1.0;
    m(10, 3) = 1.0;
    return Superoperator(std::move(m), true, true);
}

Superoperator trace_superop() {
    ComplexMatrix m = ComplexMatrix::Zero(4, 16);
    m(0, 0) = m(0, 10) = 1.0;
    m(1, 1) = m(1, 11) = 1.0;
    m(2, 4) = m(2, 14) = 1.0;
    m(3, 5) = m(3, 15) = 1.0;
    return Superoperator(std::move(m), true, true);
}

ComplexMatrix swap_gate() {
    ComplexMatrix u = ComplexMatrix::Zero(4, 4);
    u(0, 0) = u(1, 2) = u(2, 1) = u(3, 3) = 1.0;
    return u;
}

Superoperator swap_superop() {
    return unitary_superop(swap_gate());
}

Superoperator depolarizing_superop(double strength, int n) {
    if (!(strength >= 0.0 && strength <= 1.0)) {
        throw Error(ErrorKind::StrengthOutOfRange, "depolarizing strength must lie in [0, 1]");
    }
    Eigen::Index dim = Eigen::Index{1} << n;
    ComplexVector id = vec_identity(dim);
    ComplexMatrix m = (1.0 - strength) * ComplexMatrix::Identity(dim * dim, dim * dim) +
                      (strength / static_cast<double>(dim)) * id * id.transpose();
    return Superoperator(std::move(m), true, true);
}

Superoperator tensor_superop(const Superoperator &a, const Superoperator &b) {
    const Eigen::Index ai = a.hilbert_in(), ao = a.hilbert_out();
    const Eigen::Index bi = b.hilbert_in(), bo = b.hilbert_out();
    const Eigen::Index in = ai * bi, out = ao * bo;
    ComplexMatrix m = ComplexMatrix::Zero(out * out, in * in);
    for (Eigen::Index i1 = 0; i1 < ao; ++i1) {
        for (Eigen::Index j1 = 0; j1 < ao; ++j1) {
            for (Eigen::Index k1 = 0; k1 < ai; ++k1) {
                for (Eigen::Index l1 = 0; l1 < ai; ++l1) {
                    Complex av = a.matrix()(i1 * ao + j1, k1 * ai + l1);
                    if (av == Complex(0.0)) {
                        continue;
                    }
                    for (Eigen::Index i2 = 0; i2 < bo; ++i2) {
                        for (Eigen::Index j2 = 0; j2 < bo; ++j2) {
                            for (Eigen::Index k2 = 0; k2 < bi; ++k2) {
                                for (Eigen::Index l2 = 0; l2 < bi; ++l2) {
                                    Eigen::Index row = (i1 * bo + i2) * out + (j1 * bo + j2);
                                    Eigen::Index col = (k1 * bi + k2) * in + (l1 * bi + l2);
                                    m(row, col) = av * b.matrix()(i2 * bo + j2, k2 * bi + l2);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return Superoperator(std::move(m), a.trace_preserving() && b.trace_preserving(),
                         a.completely_positive() && b.completely_positive());
}

ComplexMatrix choi_matrix(const Superoperator &s) {
    const Eigen::Index din = s.hilbert_in(), dout = s.hilbert_out();
    ComplexMatrix choi = ComplexMatrix::Zero(din * dout, din * dout);
    for (Eigen::Index i = 0; i < din; ++i) {
        for (Eigen::Index j = 0; j < din; ++j) {
            ComplexMatrix image = unvec(s.matrix().col(i * din + j));
            choi.block(i * dout, j * dout, dout, dout) = image;
        }
    }
    return choi;
}

bool is_trace_preserving(const Superoperator &s, double tol) {
    ComplexVector dual = s.matrix().adjoint() * vec_identity(s.hilbert_out());
    return (dual - vec_identity(s.hilbert_in())).cwiseAbs().maxCoeff() <= tol;
}

bool is_completely_positive(const Superoperator &s, double tol) {
    ComplexMatrix choi = choi_matrix(s);
    if ((choi - choi.adjoint()).cwiseAbs().maxCoeff() > tol) {
        return false;
    }
    ComplexMatrix herm = 0.5 * (choi + choi.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -tol;
}

Superoperator lindblad_generator(const LindbladSpec &spec) {
    const ComplexMatrix &h = spec.hamiltonian;
    if (!is_hermitian(h)) {
        throw Error(ErrorKind::NonHermitianInput, "Lindblad Hamiltonian is not Hermitian");
    }
    const Eigen::Index dim = h.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
    const Complex minus_i(0.0, -1.0);
    ComplexMatrix g = minus_i * (kron(h, id) - kron(id, h.transpose()));
    for (const auto &c : spec.collapse) {
        if (c.op.rows() != dim || c.op.cols() != dim) {
            throw Error(ErrorKind::DimensionMismatch, "collapse operator dimension differs from H");
        }
        if (!(c.rate >= 0.0)) {
            throw Error(ErrorKind::InvalidConfig, "collapse rates must be nonnegative");
        }
        ComplexMatrix ldl = c.op.adjoint() * c.op;
        g += c.rate * (kron(c.op, c.op.conjugate()) - 0.5 * kron(ldl, id) - 0.5 * kron(id, ldl.transpose()));
    }
    return Superoperator(std::move(g));
}

PiecewiseGenerator::PiecewiseGenerator(std::vector<GeneratorSegment> segments) {
    for (auto &s : segments) {
        add(std::move(s.generator), s.duration);
    }
}

void PiecewiseGenerator::add(Superoperator generator, double duration) {
    if (!(duration > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "segment durations must be positive");
    }
    if (generator.dim_in() != generator.dim_out() ||
        (!segments_.empty() && generator.dim_in() != segments_.front().generator.dim_in())) {
        throw Error(ErrorKind::DimensionMismatch, "schedule generators must share one square dimension");
    }
    segments_.push_back({std::move(generator), duration});
}

ComplexMatrix expm_general(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "matrix exponential needs a square matrix");
    }
    return m.exp();
}

Superoperator magnus2_propagator(const PiecewiseGenerator &schedule) {
    if (schedule.empty()) {
        throw Error(ErrorKind::EmptySchedule, "magnus2_propagator needs at least one segment");
    }
    const auto &segs = schedule.segments();
    const Eigen::Index dim = segs.front().generator.dim_in();
    ComplexMatrix omega1 = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix omega2 = ComplexMatrix::Zero(dim, dim);
    for (size_t j = 0; j < segs.size(); ++j) {
        ComplexMatrix gj = segs[j].generator.matrix() * segs[j].duration;
        for (size_t k = 0; k < j; ++k) {
            ComplexMatrix gk = segs[k].generator.matrix() * segs[k].duration;
            omega2 += 0.5 * (gj * gk - gk * gj);
        }
        omega1 += gj;
    }
    Superoperator raw(expm_general(omega1 + omega2));
    return Superoperator(raw.matrix(), is_trace_preserving(raw, 1e-8), is_completely_positive(raw));
}

Superoperator lambda_noise(const Superoperator &s_gate) {
    if (s_gate.dim_in() != 16 || s_gate.dim_out() != 16) {
        throw Error(ErrorKind::DimensionMismatch, "lambda_noise expects a 16 x 16 two-qubit supermatrix");
    }
    return compose(trace_superop(), compose(s_gate, prep_superop()));
}

std::string format_superop(const Superoperator &s) {
    std::ostringstream out;
    out << "superoperator " << s.dim_in() << ' ' << s.dim_out() << " tp=" << (s.trace_preserving() ? 1 : 0)
        << " cp=" << (s.completely_positive() ? 1 : 0) << '\n';
    for (Eigen::Index r = 0; r < s.dim_out(); ++r) {
        for (Eigen::Index c = 0; c < s.dim_in(); ++c) {
            if (c > 0) {
                out << ',';
            }
            out << format_double(s.matrix()(r, c).real()) << ',' << format_double(s.matrix()(r, c).imag());
        }
        out << '\n';
    }
    return out.str();
}

Superoperator parse_superop(std::string_view text) {
    size_t line_no = 0;
    bool have_header = false;
    long dim_in = 0, dim_out = 0;
    bool tp = false, cp = false;
    ComplexMatrix m;
    long row = 0;

    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty() || trim(line).front() == '#') {
            if (eol == text.size()) {
                break;
            }
            continue;
        }

        if (!have_header) {
            std::istringstream header{std::string(line)};
            std::string word, in_tok, out_tok, tp_tok, cp_tok;
            header >> word >> in_tok >> out_tok >> tp_tok >> cp_tok;
            if (word != "superoperator") {
                throw ParseError("expected header 'superoperator <dim_in> <dim_out> tp=<0|1> cp=<0|1>'", line_no, 1);
            }
            dim_in = parse_int(in_tok, line_no, line.find(in_tok) + 1);
            dim_out = parse_int(out_tok, line_no, line.find(out_tok) + 1);
            if ((tp_tok != "tp=0" && tp_tok != "tp=1") || (cp_tok != "cp=0" && cp_tok != "cp=1")) {
                throw ParseError("malformed flags, expected tp=<0|1> cp=<0|1>", line_no,
                                 line.find("tp") == std::string_view::npos ? line.size() + 1 : line.find("tp") + 1);
            }
            for (long dim : {dim_in, dim_out}) {
                long root = std::lround(std::sqrt(static_cast<double>(dim)));
                if (dim < 1 || root * root != dim) {
                    throw Error(ErrorKind::DimensionMismatch,
                                "superoperator dimension " + std::to_string(dim) + " is not a perfect square");
                }
            }
            tp = tp_tok == "tp=1";
            cp = cp_tok == "cp=1";
            m = ComplexMatrix::Zero(dim_out, dim_in);
            have_header = true;
        } else {
            if (row >= dim_out) {
                throw ParseError("more rows than dim_out = " + std::to_string(dim_out), line_no, 1);
            }
            std::vector<double> values;
            size_t start = 0;
            while (true) {
                size_t comma = line.find(',', start);
                std::string_view token = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
                values.push_back(parse_number(token, line_no, start + 1));
                if (comma == std::string_view::npos) {
                    break;
                }
                start = comma + 1;
            }
            if (values.size() != static_cast<size_t>(2 * dim_in)) {
                throw ParseError("row has " + std::to_string(values.size()) + " numbers, expected " +
                                     std::to_string(2 * dim_in),
                                 line_no, line.size() + 1);
            }
            for (long c = 0; c < dim_in; ++c) {
                m(row, c) = Complex(values[static_cast<size_t>(2 * c)], values[static_cast<size_t>(2 * c + 1)]);
            }
            ++row;
        }
        if (eol == text.size()) {
            break;
        }
    }
    if (!have_header) {
        throw ParseError("missing superoperator header", line_no, 1);
    }
    if (row != dim_out) {
        throw ParseError("expected " + std::to_string(dim_out) + " rows, found " + std::to_string(row), line_no, 1);
    }
    Superoperator s(std::move(m), tp, cp);
    if (tp && !is_trace_preserving(s)) {
        throw Error(ErrorKind::ChannelValidation, "channel flagged trace-preserving fails the dual-identity check");
    }
    if (cp && !is_completely_positive(s)) {
        throw Error(ErrorKind::ChannelValidation, "channel flagged completely positive has a negative Choi eigenvalue");
    }
    return s;
}

void save_superop(const Superoperator &s, const std::filesystem::path &path) {
    write_file_atomic(path, format_superop(s));
}

Superoperator load_superop(const std::filesystem::path &path) {
    return parse_superop(read_file(path));
}

}  // namespace qhl
