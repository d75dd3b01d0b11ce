#include "stnet/semiclassical.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace stnet {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I(0, 1);

Vec3 any_orthogonal(const Vec3& n) {
    Vec3 e = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return (e - e.dot(n) * n).normalized();
}

Vec3 random_orthogonal(const Vec3& n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        Vec3 r(g(rng), g(rng), g(rng));
        Vec3 f = r - r.dot(n) * n;
        if (f.norm() > 1e-6) return f.normalized();
    }
}

Spinor fix_sign(Spinor z) {
    Complex lead = std::abs(z.a) > 1e-300 ? z.a : z.b;
    double key = std::abs(lead.real()) > 1e-300 ? lead.real() : lead.imag();
    return key < 0 ? z * Complex(-1) : z;
}

Eigen::Matrix2cd outer(const Spinor& z, const Spinor& w) {
    Eigen::Matrix2cd m;
    m << z.a * std::conj(w.a), z.a * std::conj(w.b), z.b * std::conj(w.a), z.b * std::conj(w.b);
    return m;
}

struct KzFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const Eigen::Matrix4d& k;
    double step;

    int inputs() const { return 16; }
    int values() const { return 16; }

    static SpinorQuad unpack(const Eigen::VectorXd& x) {
        SpinorQuad z;
        for (int i = 0; i < 4; ++i) z[i] = {{x[4 * i], x[4 * i + 1]}, {x[4 * i + 2], x[4 * i + 3]}};
        return z;
    }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
        SpinorQuad z = unpack(x);
        f.resize(16);
        for (int i = 0; i < 4; ++i) {
            Complex r0 = -std::conj(z[i].a), r1 = -std::conj(z[i].b);
            for (int j = 0; j < 4; ++j) {
                if (j == i || k(i, j) == 0) continue;
                Complex c = k(i, j) / bracket(z[j], z[i]);
                r0 += c * -z[j].b;
                r1 += c * z[j].a;
            }
            f[4 * i] = r0.real();
            f[4 * i + 1] = r0.imag();
            f[4 * i + 2] = r1.real();
            f[4 * i + 3] = r1.imag();
        }
        for (int i = 0; i < 16; ++i)
            if (!std::isfinite(f[i])) f[i] = 1e150;
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
        jac.resize(16, 16);
        Eigen::VectorXd xp = x, xm = x, fp, fm;
        for (int c = 0; c < 16; ++c) {
            double h = step * std::max(1.0, std::abs(x[c]));
            xp[c] = x[c] + h;
            xm[c] = x[c] - h;
            (*this)(xp, fp);
            (*this)(xm, fm);
            jac.col(c) = (fp - fm) / (2 * h);
            xp[c] = xm[c] = x[c];
        }
        return 0;
    }
};

// Traceless part of sum |z><z| for every tetrahedron; 15 real numbers.
Eigen::VectorXd closure_vector(const TwistedSimplexGeometry& g) {
    Eigen::VectorXd c(15);
    for (int a = 0; a < 5; ++a) {
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
        for (int i = 0; i < 5; ++i)
            if (i != a) m += outer(g.z[a][i], g.z[a][i]);
        c[3 * a] = (m(0, 0) - m(1, 1)).real();
        c[3 * a + 1] = m(0, 1).real();
        c[3 * a + 2] = m(0, 1).imag();
    }
    return c;
}

// Ten independent spinors z^a_i (a < i); the partners are fixed by gluing.
Eigen::VectorXd pack_faces(const TwistedSimplexGeometry& g) {
    Eigen::VectorXd x(40);
    int p = 0;
    for (int a = 0; a < 5; ++a)
        for (int i = a + 1; i < 5; ++i) {
            const Spinor& z = g.z[a][i];
            x.segment<4>(p) << z.a.real(), z.a.imag(), z.b.real(), z.b.imag();
            p += 4;
        }
    return x;
}

TwistedSimplexGeometry unpack_faces(const Eigen::VectorXd& x) {
    TwistedSimplexGeometry g;
    int p = 0;
    for (int a = 0; a < 5; ++a)
        for (int i = a + 1; i < 5; ++i) {
            Spinor z{{x[p], x[p + 1]}, {x[p + 2], x[p + 3]}};
            g.z[a][i] = z;
            g.z[i][a] = z.dual() * Complex(-1);
            p += 4;
        }
    return g;
}

Eigen::MatrixXd closure_jacobian(const Eigen::VectorXd& x) {
    Eigen::MatrixXd jac(15, 40);
    const double h = 1e-7;
    for (int c = 0; c < 40; ++c) {
        Eigen::VectorXd xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        jac.col(c) = (closure_vector(unpack_faces(xp)) - closure_vector(unpack_faces(xm))) / (2 * h);
    }
    return jac;
}

Vec4 null_vector(const Eigen::Matrix<double, 3, 4>& m) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(m, Eigen::ComputeFullV);
    return svd.matrixV().col(3);
}

// Self-dual part of the bivector u ^ v in R^4 as a 3-vector.
Vec3 self_dual(const Vec4& u, const Vec4& v) {
    Eigen::Matrix4d B = u * v.transpose() - v * u.transpose();
    return Vec3(0.5 * (B(0, 1) + B(2, 3)), 0.5 * (B(0, 2) + B(3, 1)), 0.5 * (B(0, 3) + B(1, 2)));
}

double lgamma_int(double n) { return std::lgamma(n + 1); }

nlohmann::json spinor_json(const Spinor& z) {
    return nlohmann::json::array({{z.a.real(), z.a.imag()}, {z.b.real(), z.b.imag()}});
}

Spinor spinor_from(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument(where + ": expected [[re,im],[re,im]]");
    auto comp = [&](int c) {
        const auto& e = j[c];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw std::invalid_argument(where + "[" + std::to_string(c) + "]: expected [re,im]");
        return Complex(e[0].get<double>(), e[1].get<double>());
    };
    return {comp(0), comp(1)};
}

Vec3 vec3_from(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument(where + ": expected three numbers");
    Vec3 v;
    for (int c = 0; c < 3; ++c) {
        if (!j[c].is_number()) throw std::invalid_argument(where + "[" + std::to_string(c) + "]: expected a number");
        v[c] = j[c].get<double>();
    }
    return v;
}

void expect_schema(const nlohmann::json& j, const std::string& schema) {
    if (!j.is_object() || !j.contains("schema") || j["schema"] != schema)
        throw std::invalid_argument("schema: expected \"" + schema + "\"");
}

}  // namespace

Complex angle_product(const Spinor& z, const Spinor& w) { return std::conj(z.a) * w.a + std::conj(z.b) * w.b; }
Complex bracket(const Spinor& z, const Spinor& w) { return z.a * w.b - w.a * z.b; }
Complex square_product(const Spinor& z, const Spinor& w) { return std::conj(angle_product(z, w)); }
double spinor_distance(const Spinor& z, const Spinor& w) { return std::sqrt((z - w).norm()); }

double FramedTetrahedron::closure_residual() const {
    Vec3 s = Vec3::Zero();
    for (int i = 0; i < 4; ++i) s += area[i] * normal[i];
    return s.norm();
}

double FramedTetrahedron::frame_residual() const {
    double r = 0;
    for (int i = 0; i < 4; ++i) {
        if (area[i] == 0) continue;
        r = std::max({r, std::abs(frame[i].dot(normal[i])), std::abs(normal[i].norm() - 1), std::abs(frame[i].norm() - 1)});
    }
    return r;
}

Spinor face_spinor(double area, const Vec3& N, const Vec3& F) {
    if (area == 0) return {};
    if (area < 0) throw GeometryError("face area must be non-negative");
    Eigen::Vector3cd V = F.cast<Complex>() + I * N.cross(F).cast<Complex>();
    Complex a2 = I * (area / 2) * (V[0] - I * V[1]);
    Complex b2 = -I * (area / 2) * (V[0] + I * V[1]);
    Complex ab = -I * (area / 2) * V[2];
    Spinor z;
    if (std::abs(a2) >= std::abs(b2)) {
        z.a = std::sqrt(a2);
        z.b = ab / z.a;
    } else {
        z.b = std::sqrt(b2);
        z.a = ab / z.b;
    }
    return fix_sign(z);
}

SpinorQuad spinors_from_framed_tet(const FramedTetrahedron& t, double tol) {
    double total = 0;
    for (double A : t.area) total += A;
    if (t.closure_residual() > tol * std::max(1.0, total)) {
        std::ostringstream os;
        os << "closure violated: |sum A_i N_i| = " << t.closure_residual();
        throw GeometryError(os.str());
    }
    if (t.frame_residual() > tol) {
        std::ostringstream os;
        os << "frames are not unit vectors orthogonal to unit normals (residual " << t.frame_residual() << ")";
        throw GeometryError(os.str());
    }
    SpinorQuad z;
    for (int i = 0; i < 4; ++i) z[i] = face_spinor(t.area[i], t.normal[i], t.frame[i]);
    return z;
}

double closure_residual(const SpinorQuad& z) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    double A = 0;
    for (auto& s : z) {
        m += outer(s, s);
        A += s.norm();
    }
    m -= (A / 2) * Eigen::Matrix2cd::Identity();
    return m.cwiseAbs().maxCoeff();
}

FramedTetrahedron framed_tet_from_spinors(const SpinorQuad& z, double tol) {
    double A = 0;
    int faces = 0;
    for (auto& s : z) {
        A += s.norm();
        faces += s.norm() > 0;
    }
    if (faces < 3) throw GeometryError("degenerate input: a tetrahedron needs at least three faces of positive area");
    double r = closure_residual(z);
    if (r > tol * A) {
        std::ostringstream os;
        os << "closure violated: |sum |z><z| - A/2| = " << r;
        throw GeometryError(os.str());
    }
    FramedTetrahedron t;
    for (int i = 0; i < 4; ++i) {
        const Spinor& s = z[i];
        double Ai = s.norm();
        t.area[i] = Ai;
        if (Ai == 0) {
            t.normal[i] = t.frame[i] = Vec3::Zero();
            continue;
        }
        Complex ab = s.a * std::conj(s.b);
        t.normal[i] = Vec3(2 * ab.real(), -2 * ab.imag(), std::norm(s.a) - std::norm(s.b)) / Ai;
        Complex v1 = -I * (s.a * s.a - s.b * s.b) / Ai, v2 = (s.a * s.a + s.b * s.b) / Ai, v3 = 2.0 * I * s.a * s.b / Ai;
        t.frame[i] = Vec3(v1.real(), v2.real(), v3.real());
    }
    return t;
}

FramedTetrahedron random_tetrahedron(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        std::array<Vec3, 4> P;
        for (auto& p : P) p = Vec3(g(rng), g(rng), g(rng));
        double vol = std::abs((P[1] - P[0]).dot((P[2] - P[0]).cross(P[3] - P[0]))) / 6;
        if (vol < 0.05) continue;
        FramedTetrahedron t;
        for (int i = 0; i < 4; ++i) {
            std::array<int, 3> f;
            int c = 0;
            for (int v = 0; v < 4; ++v)
                if (v != i) f[c++] = v;
            Vec3 n = (P[f[1]] - P[f[0]]).cross(P[f[2]] - P[f[0]]);
            if (n.dot(P[f[0]] - P[i]) < 0) n = -n;
            t.area[i] = n.norm() / 2;
            t.normal[i] = n.normalized();
            t.frame[i] = random_orthogonal(t.normal[i], rng);
        }
        return t;
    }
}

FramedTetrahedron regular_tetrahedron(double area) {
    std::array<Vec3, 4> v = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
    FramedTetrahedron t;
    for (int i = 0; i < 4; ++i) {
        t.area[i] = area;
        t.normal[i] = -v[i].normalized();
        t.frame[i] = any_orthogonal(t.normal[i]);
    }
    return t;
}

SpinorQuad rotate(const SpinorQuad& z, const Eigen::Matrix2cd& g) {
    SpinorQuad out;
    for (int i = 0; i < 4; ++i) {
        Eigen::Vector2cd v(z[i].a, z[i].b);
        v = g * v;
        out[i] = {v[0], v[1]};
    }
    return out;
}

Eigen::Matrix2cd random_su2(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::Vector4d q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    Complex a(q[0], q[1]), b(q[2], q[3]);
    Eigen::Matrix2cd m;
    m << a, -std::conj(b), b, std::conj(a);
    return m;
}

Eigen::Matrix4d k_from_spinors(const SpinorQuad& z) {
    double J = 0;
    for (auto& s : z) J += s.norm() / 2;
    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    if (J == 0) return k;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) k(i, j) = std::norm(bracket(z[j], z[i])) / J;
    return k;
}

Eigen::Matrix4d k_to_real(const KMatrix& k) {
    if (k.n() != 4) throw std::invalid_argument("closure needs a four-valent k matrix");
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) m(i, j) = k(i, j);
    return m;
}

double kz_residual(const SpinorQuad& z, const Eigen::Matrix4d& k) {
    Eigen::Matrix4d kk = k;
    KzFunctor f{kk, 0};
    Eigen::VectorXd x(16), r;
    for (int i = 0; i < 4; ++i) x.segment<4>(4 * i) << z[i].a.real(), z[i].a.imag(), z[i].b.real(), z[i].b.imag();
    f(x, r);
    return r.cwiseAbs().maxCoeff();
}

ClosureSolution solve_closure(const Eigen::Matrix4d& k, const ClosureOptions& opt) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (k(i, j) < 0) throw std::invalid_argument("k entries must be non-negative");
            if (i != j && std::abs(k(i, j) - k(j, i)) > 1e-12) throw std::invalid_argument("k must be symmetric");
        }
    double J = k.sum() / 2;
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> g;
    ClosureSolution best;
    best.residual = std::numeric_limits<double>::infinity();
    double best_score = best.residual;
    KzFunctor f{k, opt.fd_step};
    for (int attempt = 0; attempt < opt.restarts; ++attempt) {
        Eigen::VectorXd x(16);
        for (int i = 0; i < 4; ++i) {
            double scale = std::sqrt(std::max(k.row(i).sum(), 0.0) / 2);
            for (int c = 0; c < 4; ++c) x[4 * i + c] = scale * g(rng);
        }
        if (J > 0) {
            Eigen::LevenbergMarquardt<KzFunctor> lm(f);
            lm.parameters.maxfev = opt.max_evaluations;
            lm.parameters.xtol = 1e-15;
            lm.parameters.ftol = 1e-15;
            lm.parameters.gtol = 0;
            lm.minimize(x);
        }
        SpinorQuad z = KzFunctor::unpack(x);
        double r = kz_residual(z, k);
        double scale = std::max(1.0, k.maxCoeff());
        double mismatch = J > 0 ? (k_from_spinors(z) - k).cwiseAbs().maxCoeff() / scale : 0;
        double score = std::max(r, mismatch);
        if (score < best_score) {
            best.z = z;
            best.residual = r;
            best_score = score;
        }
        best.restarts_used = attempt + 1;
        if (best_score < opt.tolerance) break;
    }
    for (auto& s : best.z) s = s.norm() > 0 ? fix_sign(s) : s;
    best.geometric = best_score < opt.tolerance;
    return best;
}

ClosureSolution solve_closure(const KMatrix& k, const ClosureOptions& opt) {
    auto tj = k.twice_spins();
    for (int i = 0; i < 4 && i < static_cast<int>(tj.size()); ++i)
        if (tj[i] < 0) throw AdmissibilityError("negative spin");
    return solve_closure(k_to_real(k), opt);
}

int orientation(int i, int j) { return i < j ? 1 : -1; }

double wrap_angle(double x) {
    double y = std::remainder(x, 2 * pi);
    return y <= -pi ? y + 2 * pi : y;
}

TetAngles geometry_angles(const SpinorQuad& z, double tol) {
    TetAngles t;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            Complex br = bracket(z[i], z[j]), sq = square_product(z[i], z[j]);
            double scale = std::sqrt(z[i].norm() * z[j].norm());
            t.theta[i][j] = 2 * std::atan2(std::abs(br), std::abs(sq));
            if (std::abs(br) <= tol * scale || std::abs(sq) <= tol * scale) t.degenerate = true;
            double P = std::arg(double(orientation(i, j)) * br), Q = std::arg(sq);
            t.alpha[i][j] = P + Q;
        }
    return t;
}

ThreeTermResiduals three_term_residuals(const SpinorQuad& z) {
    TetAngles t = geometry_angles(z);
    ThreeTermResiduals r;
    auto c = [&](int i, int j) { return std::cos(t.theta[i][j] / 2); };
    auto s = [&](int i, int j) { return orientation(i, j) * std::sin(t.theta[i][j] / 2); };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                if (i == j || j == k || i == k) continue;
                if (z[i].norm() == 0 || z[j].norm() == 0 || z[k].norm() == 0) continue;
                double lhs = orientation(i, j) * orientation(i, k) * std::cos(t.alpha_jk(i, j, k)) *
                             std::sin(t.theta[i][j]) * std::sin(t.theta[i][k]);
                double rhs = std::cos(t.theta[j][k]) - std::cos(t.theta[i][j]) * std::cos(t.theta[i][k]);
                r.spherical = std::max(r.spherical, std::abs(lhs - rhs));
                Complex e_jki = std::exp(I * t.alpha_jk(j, k, i));
                Complex first = c(i, j) * c(j, k) - s(i, j) * s(j, k) * e_jki -
                                c(i, k) * std::exp(I * (t.alpha_jk(i, j, k) + t.alpha_jk(j, k, i) + t.alpha_jk(k, i, j)) / 2.0);
                Complex second = c(i, j) * s(j, k) + s(i, j) * c(j, k) * e_jki -
                                 s(i, k) * std::exp(I * (t.alpha_jk(i, j, k) - t.alpha_jk(j, i, k) - t.alpha_jk(k, i, j)) / 2.0);
                r.first = std::max(r.first, std::abs(first));
                r.second = std::max(r.second, std::abs(second));
            }
    return r;
}

int quad_slot(int a, int i) {
    if (a == i || a < 0 || i < 0 || a > 4 || i > 4) throw std::invalid_argument("face index must differ from the tetrahedron");
    return i < a ? i : i - 1;
}

SpinorQuad TwistedSimplexGeometry::quad(int a) const {
    SpinorQuad q;
    for (int i = 0; i < 5; ++i)
        if (i != a) q[quad_slot(a, i)] = z[a][i];
    return q;
}

double gluing_residual(const TwistedSimplexGeometry& g, std::vector<double>* per_face) {
    double worst = 0;
    if (per_face) per_face->clear();
    for (int a = 0; a < 5; ++a)
        for (int i = a + 1; i < 5; ++i) {
            double r = spinor_distance(g.z[a][i], g.z[i][a].dual() * Complex(orientation(a, i)));
            if (per_face) per_face->push_back(r);
            worst = std::max(worst, r);
        }
    return worst;
}

double simplex_closure_residual(const TwistedSimplexGeometry& g) {
    double worst = 0;
    for (int a = 0; a < 5; ++a) worst = std::max(worst, closure_residual(g.quad(a)));
    return worst;
}

std::array<Vec4, 5> simplex_normals(const std::array<Vec4, 5>& P) {
    std::array<Vec4, 5> n;
    for (int a = 0; a < 5; ++a) {
        std::array<int, 4> o;
        int c = 0;
        for (int v = 0; v < 5; ++v)
            if (v != a) o[c++] = v;
        Eigen::Matrix<double, 3, 4> m;
        for (int r = 0; r < 3; ++r) m.row(r) = (P[o[r + 1]] - P[o[0]]).transpose();
        Vec4 N = null_vector(m);
        if (N.dot(P[o[0]] - P[a]) < 0) N = -N;
        n[a] = N.normalized();
    }
    return n;
}

TwistedSimplexGeometry simplex_from_embedding(const std::array<Vec4, 5>& P, std::mt19937_64& rng) {
    auto n4 = simplex_normals(P);
    TwistedSimplexGeometry g;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) {
            std::array<int, 3> tri;
            int c = 0;
            for (int v = 0; v < 5; ++v)
                if (v != a && v != b) tri[c++] = v;
            Vec4 e1 = P[tri[1]] - P[tri[0]], e2 = P[tri[2]] - P[tri[0]];
            Eigen::Matrix<double, 3, 4> m;
            m.row(0) = e1.transpose();
            m.row(1) = e2.transpose();
            m.row(2) = n4[a].transpose();
            Vec4 n = null_vector(m);
            if (n.dot(P[tri[0]] - P[b]) < 0) n = -n;
            double area = 0.5 * std::sqrt(e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2));
            Vec3 N = self_dual(n4[a], n).normalized();
            Spinor z = face_spinor(area, N, random_orthogonal(N, rng));
            g.z[a][b] = z;
            g.z[b][a] = z.dual() * Complex(-1);
        }
    return g;
}

std::array<Vec4, 5> regular_simplex_vertices() {
    double t = (1 - std::sqrt(5.0)) / 4;
    return {Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0), Vec4(0, 0, 1, 0), Vec4(0, 0, 0, 1), Vec4(t, t, t, t)};
}

std::array<Vec4, 5> random_simplex_vertices(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        std::array<Vec4, 5> P;
        for (auto& p : P) p = Vec4(g(rng), g(rng), g(rng), g(rng));
        Eigen::Matrix4d m;
        for (int r = 0; r < 4; ++r) m.row(r) = (P[r + 1] - P[0]).transpose();
        if (std::abs(m.determinant()) / 24 > 0.02) return P;
    }
}

double SimplexAngles::xi_oriented(int a, int b, int i) const {
    double x = xi(a, b, i);
    return orientation(i, b) * orientation(a, i) < 0 ? x + pi : x;
}

SimplexAngles simplex_angles(const TwistedSimplexGeometry& g) {
    SimplexAngles s;
    for (int a = 0; a < 5; ++a) {
        TetAngles t = geometry_angles(g.quad(a));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (i == a || j == a || i == j) continue;
                s.theta[a][i][j] = t.theta[quad_slot(a, i)][quad_slot(a, j)];
                s.alpha[a][i][j] = t.alpha[quad_slot(a, i)][quad_slot(a, j)];
            }
    }
    return s;
}

double angle_table_mismatch(const TwistedSimplexGeometry& g, const SimplexAngles& angles) {
    SimplexAngles fresh = simplex_angles(g);
    double worst = 0;
    for (int a = 0; a < 5; ++a)
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (i == a || j == a || i == j) continue;
                worst = std::max(worst, std::abs(wrap_angle(angles.alpha[a][i][j] - fresh.alpha[a][i][j])));
                worst = std::max(worst, std::abs(angles.theta[a][i][j] - fresh.theta[a][i][j]));
            }
    return worst;
}

void gauge_transform(TwistedSimplexGeometry& g, SimplexAngles& angles, const double theta[5][5]) {
    for (int a = 0; a < 5; ++a)
        for (int i = a + 1; i < 5; ++i)
            if (std::abs(theta[a][i] + theta[i][a]) > 1e-12)
                throw std::invalid_argument("gauge angles must satisfy theta[a][i] = -theta[i][a]");
    for (int a = 0; a < 5; ++a)
        for (int i = 0; i < 5; ++i) {
            if (i == a) continue;
            g.z[a][i] = g.z[a][i] * std::exp(I * (theta[a][i] / 2));
            for (int j = 0; j < 5; ++j)
                if (j != a && j != i) angles.alpha[a][i][j] += theta[a][i];
        }
}

TwistedAction twisted_action(const TwistedSimplexGeometry& g, const SimplexAngles& al, double tol) {
    std::vector<double> faces;
    double glue = gluing_residual(g, &faces);
    double scale = 0;
    for (int a = 0; a < 5; ++a)
        for (int i = 0; i < 5; ++i)
            if (i != a) scale = std::max(scale, std::sqrt(g.area(a, i)));
    if (glue > tol * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "gluing violated; per-face residuals";
        int p = 0;
        for (int a = 0; a < 5; ++a)
            for (int i = a + 1; i < 5; ++i) os << " (" << a << i << ")=" << faces[p++];
        throw GeometryError(os.str());
    }
    TwistedAction act;
    for (int a = 0; a < 5; ++a) {
        double J = 0;
        for (int i = 0; i < 5; ++i)
            if (i != a) {
                act.spin[a][i] = g.area(a, i) / 2;
                J += act.spin[a][i];
            }
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                if (i != a && j != a && i != j && J > 0) act.k[a][i][j] = std::norm(bracket(g.z[a][i], g.z[a][j])) / J;
    }
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            double xi = 0;
            for (int k = 0; k < 5; ++k)
                if (k != i && k != j) xi += al.xi(i, j, k) / 3;
            act.regge_part += (act.spin[i][j] + act.spin[j][i]) / 2 * xi;
        }
    for (int a = 0; a < 5; ++a)
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) {
                if (i == a || j == a) continue;
                double angle = 0;
                for (int b = 0; b < 5; ++b) {
                    if (b == a || b == i || b == j) continue;
                    angle += (al.alpha[a][i][j] - al.alpha[a][i][b] + al.alpha[a][j][i] - al.alpha[a][j][b]) / 6;
                }
                act.intertwiner_part += act.k[a][i][j] * angle;
                act.corner_form += act.k[a][i][j] * (al.alpha[a][i][j] + al.alpha[a][j][i]) / 2;
            }
    act.split_form = act.regge_part + act.intertwiner_part;
    return act;
}

TwistedAction twisted_action(const TwistedSimplexGeometry& g, double tol) {
    return twisted_action(g, simplex_angles(g), tol);
}

DihedralCheck dihedral_4d_check(const TwistedSimplexGeometry& g, double tol) {
    SimplexAngles s = simplex_angles(g);
    DihedralCheck d;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            for (int i = 0; i < 5; ++i) {
                if (a == b || a == i || b == i) continue;
                double t1 = s.theta[a][i][b], t2 = s.theta[b][a][i];
                if (std::sin(t1) < tol || std::sin(t2) < tol) ++d.degenerate;
                double r = -std::cos(t1) * std::cos(t2) +
                           orientation(i, b) * orientation(a, i) * std::sin(t1) * std::sin(t2) * std::cos(s.xi(a, b, i)) -
                           std::cos(s.theta[i][a][b]);
                d.residuals.push_back(r);
                d.max_residual = std::max(d.max_residual, std::abs(r));
            }
    return d;
}

std::vector<ShapeMatchFace> shape_matching_check(const TwistedSimplexGeometry& g, double tol) {
    SimplexAngles s = simplex_angles(g);
    std::vector<ShapeMatchFace> out;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) {
            ShapeMatchFace f;
            f.a = a;
            f.b = b;
            if (g.area(a, b) < 1e-12) {
                f.skipped = true;
                out.push_back(f);
                continue;
            }
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) {
                    if (i == j || i == a || i == b || j == a || j == b) continue;
                    double shift = s.xi_oriented(a, b, i) - s.xi(a, b, i) - s.xi_oriented(a, b, j) + s.xi(a, b, j);
                    double d = (s.alpha[a][b][i] - s.alpha[a][b][j]) - (s.alpha[b][a][j] - s.alpha[b][a][i]) + shift;
                    f.residual = std::max(f.residual, std::abs(wrap_angle(d)));
                }
            f.matched = f.residual < tol;
            out.push_back(f);
        }
    return out;
}

double xi_spread(const TwistedSimplexGeometry& g) {
    double worst = 0;
    for (auto& f : shape_matching_check(g)) worst = std::max(worst, f.residual);
    return worst;
}

TwistedSimplexGeometry perturb_twisted(const TwistedSimplexGeometry& g, double size, std::mt19937_64& rng) {
    Eigen::VectorXd x = pack_faces(g);
    double rms = x.norm() / std::sqrt(40.0);
    std::normal_distribution<double> nd;
    Eigen::VectorXd d(40);
    for (int c = 0; c < 40; ++c) d[c] = nd(rng);
    Eigen::MatrixXd jac = closure_jacobian(x);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
    d -= cod.solve(jac * d);
    x += size * rms * d.normalized();
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::VectorXd c = closure_vector(unpack_faces(x));
        if (c.cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, rms * rms)) break;
        Eigen::MatrixXd jx = closure_jacobian(x);
        x -= Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(jx).solve(c);
    }
    return unpack_faces(x);
}

double stirling_log_ratio(const SimplexLabels& labels) {
    double re_s = 0, log_norm = 0;
    for (auto& k : labels.corners()) {
        double J = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                double kij = k(i, j);
                J += kij;
                if (kij > 0) re_s += 0.5 * (kij * std::log(kij) - kij);
                log_norm += 0.5 * lgamma_int(kij);
            }
        if (J > 0) re_s += 0.5 * (J * std::log(J) - J);
        log_norm += 0.5 * lgamma_int(J + 1);
    }
    return log_norm == 0 ? 0 : 1 - re_s / log_norm;
}

SimplexLabels all_half_base() {
    SimplexLabels l;
    l.edge.fill(1);
    l.st.fill({0, 2});
    return l;
}

namespace {

ScanRow scan_row(const SimplexLabels& base, int lambda) {
    ScanRow row;
    row.lambda = lambda;
    SimplexLabels l = base.scaled(lambda);
    std::array<TwiceSpin, 5> S;
    for (int a = 0; a < 5; ++a) S[a] = l.st[a].first;
    row.fifteen_j = fifteen_j(l.edge, S);
    row.twenty_j = twenty_j(l);
    row.scale = twenty_to_fifteen_scale(l);
    BigRational den = row.fifteen_j * row.scale;
    row.ratio = den == 0 ? std::numeric_limits<double>::quiet_NaN() : BigRational(row.twenty_j / den).get_d();
    for (int a = 0; a < 5; ++a) {
        Spins4 j = l.vertex_spins(a);
        auto labels = admissible_st_range(base.vertex_spins(a));
        for (std::size_t p = 0; p < labels.size(); ++p)
            for (std::size_t q = p + 1; q < labels.size(); ++q) {
                STLabel x{j, labels[p].first * lambda, labels[p].second * lambda};
                STLabel y{j, labels[q].first * lambda, labels[q].second * lambda};
                double xy = scalar_product_st(x, y).get_d();
                double xx = scalar_product_st(x, x).get_d(), yy = scalar_product_st(y, y).get_d();
                row.gram_offdiag = std::max(row.gram_offdiag, std::abs(xy) / std::sqrt(xx * yy));
            }
    }
    row.stirling = stirling_log_ratio(l);
    row.complete = true;
    return row;
}

}  // namespace

ScanResult asymptotic_scan(const SimplexLabels& base, const std::vector<int>& lambdas, double budget, int threads) {
    base.validate();
    for (int lambda : lambdas)
        if (lambda < 1) throw std::invalid_argument("scaling factors must be positive");
    if (threads < 1) throw std::invalid_argument("thread count must be positive");
    auto start = std::chrono::steady_clock::now();
    ScanResult out;
    out.rows.resize(lambdas.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < lambdas.size();) {
            double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            out.rows[i].lambda = lambdas[i];
            if (budget > 0 && elapsed > budget) continue;
            try {
                out.rows[i] = scan_row(base, lambdas[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min<int>(threads, static_cast<int>(lambdas.size())); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    out.skipped = std::count_if(out.rows.begin(), out.rows.end(), [](const ScanRow& r) { return !r.complete; });
    std::erase_if(out.rows, [](const ScanRow& r) { return !r.complete; });
    auto& r = out.rows;
    bool enough = r.size() >= 2;
    out.verdicts.gram_decreasing = enough;
    out.verdicts.ratio_to_one = enough;
    out.verdicts.stirling_decreasing = enough;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i].ratio)) out.verdicts.ratio_to_one = false;
        if (i == 0) continue;
        if (!(r[i].gram_offdiag < r[i - 1].gram_offdiag)) out.verdicts.gram_decreasing = false;
        if (!(std::abs(r[i].ratio - 1) < std::abs(r[i - 1].ratio - 1))) out.verdicts.ratio_to_one = false;
        if (!(r[i].stirling < r[i - 1].stirling)) out.verdicts.stirling_decreasing = false;
    }
    return out;
}

nlohmann::json tetrahedron_to_json(const FramedTetrahedron& t) {
    nlohmann::json faces = nlohmann::json::array();
    for (int i = 0; i < 4; ++i)
        faces.push_back({{"area", t.area[i]},
                         {"normal", {t.normal[i].x(), t.normal[i].y(), t.normal[i].z()}},
                         {"frame", {t.frame[i].x(), t.frame[i].y(), t.frame[i].z()}}});
    return {{"schema", "stnet.tetrahedron/1"}, {"faces", faces}};
}

FramedTetrahedron tetrahedron_from_json(const nlohmann::json& j) {
    expect_schema(j, "stnet.tetrahedron/1");
    if (!j.contains("faces") || !j["faces"].is_array() || j["faces"].size() != 4)
        throw std::invalid_argument("faces: expected four entries");
    FramedTetrahedron t;
    for (int i = 0; i < 4; ++i) {
        std::string where = "faces[" + std::to_string(i) + "]";
        const auto& f = j["faces"][i];
        if (!f.contains("area") || !f["area"].is_number()) throw std::invalid_argument(where + ".area: expected a number");
        t.area[i] = f["area"].get<double>();
        t.normal[i] = vec3_from(f.value("normal", nlohmann::json()), where + ".normal");
        t.frame[i] = vec3_from(f.value("frame", nlohmann::json()), where + ".frame");
    }
    return t;
}

nlohmann::json spinors_to_json(const SpinorQuad& z) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& s : z) arr.push_back(spinor_json(s));
    return {{"schema", "stnet.spinors/1"}, {"spinors", arr}};
}

SpinorQuad spinors_from_json(const nlohmann::json& j) {
    expect_schema(j, "stnet.spinors/1");
    if (!j.contains("spinors") || !j["spinors"].is_array() || j["spinors"].size() != 4)
        throw std::invalid_argument("spinors: expected four entries");
    SpinorQuad z;
    for (int i = 0; i < 4; ++i) z[i] = spinor_from(j["spinors"][i], "spinors[" + std::to_string(i) + "]");
    return z;
}

nlohmann::json simplex_to_json(const TwistedSimplexGeometry& g) {
    nlohmann::json arr = nlohmann::json::array();
    for (int a = 0; a < 5; ++a)
        for (int i = 0; i < 5; ++i)
            if (i != a) arr.push_back({{"tet", a}, {"face", i}, {"z", spinor_json(g.z[a][i])}});
    return {{"schema", "stnet.simplex/1"}, {"spinors", arr}};
}

TwistedSimplexGeometry simplex_from_json(const nlohmann::json& j) {
    expect_schema(j, "stnet.simplex/1");
    if (!j.contains("spinors") || !j["spinors"].is_array()) throw std::invalid_argument("spinors: expected an array");
    TwistedSimplexGeometry g;
    std::array<std::array<bool, 5>, 5> seen{};
    for (std::size_t n = 0; n < j["spinors"].size(); ++n) {
        std::string where = "spinors[" + std::to_string(n) + "]";
        const auto& e = j["spinors"][n];
        if (!e.contains("tet") || !e["tet"].is_number_integer() || !e.contains("face") || !e["face"].is_number_integer())
            throw std::invalid_argument(where + ": expected integer tet and face");
        int a = e["tet"], i = e["face"];
        if (a < 0 || a > 4 || i < 0 || i > 4 || a == i) throw std::invalid_argument(where + ": tet and face must be distinct in 0..4");
        if (seen[a][i]) throw std::invalid_argument(where + ": duplicate entry");
        seen[a][i] = true;
        g.z[a][i] = spinor_from(e.value("z", nlohmann::json()), where + ".z");
    }
    for (int a = 0; a < 5; ++a)
        for (int i = 0; i < 5; ++i)
            if (a != i && !seen[a][i])
                throw std::invalid_argument("spinors: missing tet " + std::to_string(a) + " face " + std::to_string(i));
    return g;
}

}  // namespace stnet
