#pragma once

#include "stnet/exact.hpp"
#include "stnet/recoupling.hpp"
#include "stnet/st_basis.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace stnet {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Spinor {
    Complex a, b;

    double norm() const { return std::norm(a) + std::norm(b); }
    // |z] = (-conj b, conj a)
    Spinor dual() const { return {-std::conj(b), std::conj(a)}; }
    Spinor operator*(Complex c) const { return {a * c, b * c}; }
    Spinor operator+(const Spinor& o) const { return {a + o.a, b + o.b}; }
    Spinor operator-(const Spinor& o) const { return {a - o.a, b - o.b}; }
};

// <z|w>, [z|w> = a_z b_w - a_w b_z, [z|w] = conj <z|w>.
Complex angle_product(const Spinor& z, const Spinor& w);
Complex bracket(const Spinor& z, const Spinor& w);
Complex square_product(const Spinor& z, const Spinor& w);
double spinor_distance(const Spinor& z, const Spinor& w);

using SpinorQuad = std::array<Spinor, 4>;

struct FramedTetrahedron {
    std::array<double, 4> area{};
    std::array<Vec3, 4> normal;
    std::array<Vec3, 4> frame;

    double closure_residual() const;  // |sum A_i N_i|
    double frame_residual() const;    // max of |F_i.N_i|, ||N_i|-1|, ||F_i|-1|
};

// Spinor of one face, sign fixed so the first nonzero component has positive
// real part (positive imaginary part when the real part vanishes).
Spinor face_spinor(double area, const Vec3& normal, const Vec3& frame);
SpinorQuad spinors_from_framed_tet(const FramedTetrahedron& t, double tol = 1e-10);
FramedTetrahedron framed_tet_from_spinors(const SpinorQuad& z, double tol = 1e-9);

// || sum |z><z| - (A/2) 1 || with A the total area.
double closure_residual(const SpinorQuad& z);
FramedTetrahedron random_tetrahedron(std::mt19937_64& rng);
FramedTetrahedron regular_tetrahedron(double area = 1.0);
SpinorQuad rotate(const SpinorQuad& z, const Eigen::Matrix2cd& g);
Eigen::Matrix2cd random_su2(std::mt19937_64& rng);

// k_ij = |[z_j|z_i>|^2 / J with J half the total area.
Eigen::Matrix4d k_from_spinors(const SpinorQuad& z);
Eigen::Matrix4d k_to_real(const KMatrix& k);
// Max component of sum_{j != i} k_ij [z_j| / [z_j|z_i> - <z_i| over all i.
double kz_residual(const SpinorQuad& z, const Eigen::Matrix4d& k);

struct ClosureOptions {
    int restarts = 32;
    std::uint64_t seed = 1;
    double tolerance = 1e-10;
    double fd_step = 1e-6;
    int max_evaluations = 4000;
};

struct ClosureSolution {
    SpinorQuad z;
    double residual = 0;
    bool geometric = false;  // stationary and k_from_spinors(z) reproduces k
    int restarts_used = 0;
};

ClosureSolution solve_closure(const Eigen::Matrix4d& k, const ClosureOptions& opt = {});
ClosureSolution solve_closure(const KMatrix& k, const ClosureOptions& opt = {});

// Dihedral and twist angles with eps_ij = +1 for i < j: theta_ij in [0, pi] and
// alpha^i_j with [z_i|z_j> = eps sqrt(A_i A_j) sin(theta/2) e^{i(alpha^i_j + alpha^j_i)/2}
// and [z_i|z_j] = sqrt(A_i A_j) cos(theta/2) e^{i(alpha^i_j - alpha^j_i)/2}.
struct TetAngles {
    std::array<std::array<double, 4>, 4> theta{};
    std::array<std::array<double, 4>, 4> alpha{};
    bool degenerate = false;  // some sin(theta_ij) vanishes, alpha phases undefined

    double alpha_jk(int i, int j, int k) const { return alpha[i][j] - alpha[i][k]; }
};

int orientation(int i, int j);
double wrap_angle(double x);
TetAngles geometry_angles(const SpinorQuad& z, double degenerate_tol = 1e-12);

struct ThreeTermResiduals {
    double spherical = 0;  // eps_ij eps_ik cos alpha^i_jk against the dihedral angles
    double first = 0;      // c_ij c_jk - s_ij s_jk e^{i alpha^j_ki} = c_ik e^{i(alpha^i_jk + alpha^j_ki + alpha^k_ij)/2}
    double second = 0;     // c_ij s_jk + s_ij c_jk e^{i alpha^j_ki} = s_ik e^{i(alpha^i_jk - alpha^j_ik - alpha^k_ij)/2}
};
ThreeTermResiduals three_term_residuals(const SpinorQuad& z);

// Five tetrahedra a = 0..4 with spinors z[a][i] for the face shared with i.
// Every quadruple closes; gluing reads |z^a_i> = eps_ai |z^i_a].
struct TwistedSimplexGeometry {
    std::array<std::array<Spinor, 5>, 5> z{};

    SpinorQuad quad(int a) const;  // faces i != a in increasing order
    double area(int a, int i) const { return z[a][i].norm(); }
};

// Position of face i inside tetrahedron a's quadruple.
int quad_slot(int a, int i);

double gluing_residual(const TwistedSimplexGeometry& g, std::vector<double>* per_face = nullptr);
double simplex_closure_residual(const TwistedSimplexGeometry& g);

// Flat 4-simplex with vertices P; tetrahedron a is opposite vertex a and the
// frames of the ten triangles are drawn at random.
TwistedSimplexGeometry simplex_from_embedding(const std::array<Vec4, 5>& P, std::mt19937_64& rng);
std::array<Vec4, 5> regular_simplex_vertices();
std::array<Vec4, 5> random_simplex_vertices(std::mt19937_64& rng);
// Outward unit normals of the five tetrahedra of an embedded 4-simplex.
std::array<Vec4, 5> simplex_normals(const std::array<Vec4, 5>& P);

// Angle data of all five tetrahedra: theta[a][i][j], alpha[a][i][j] = alpha^{ai}_j.
struct SimplexAngles {
    double theta[5][5][5] = {};
    double alpha[5][5][5] = {};

    double xi(int a, int b, int i) const { return alpha[a][b][i] + alpha[b][a][i]; }
    // xi shifted by pi when eps_ib eps_ai = -1; the oriented dihedral angle.
    double xi_oriented(int a, int b, int i) const;
};

SimplexAngles simplex_angles(const TwistedSimplexGeometry& g);
// Largest wrapped difference between a lifted angle table and the spinors.
double angle_table_mismatch(const TwistedSimplexGeometry& g, const SimplexAngles& angles);

// Rotates the frame of face (ai) by theta[a][i] = -theta[i][a]; spinors pick
// up e^{i theta/2} and the angle table is shifted continuously.
void gauge_transform(TwistedSimplexGeometry& g, SimplexAngles& angles, const double theta[5][5]);

struct TwistedAction {
    double split_form = 0;   // sum j_ij xi^ij + sum k^a_ij alpha^a_ij
    double corner_form = 0;   // 1/2 sum k^a_ij (alpha^{ai}_j + alpha^{aj}_i)
    double regge_part = 0;
    double intertwiner_part = 0;
    double k[5][5][5] = {};  // k^a_ij = |[z^a_i|z^a_j>|^2 / J^a
    double spin[5][5] = {};  // j_ai = <z^a_i|z^a_i> / 2
};

TwistedAction twisted_action(const TwistedSimplexGeometry& g, const SimplexAngles& angles, double tol = 1e-8);
TwistedAction twisted_action(const TwistedSimplexGeometry& g, double tol = 1e-8);

struct DihedralCheck {
    // -cos th^a_ib cos th^b_ai + eps_ib eps_ai sin th^a_ib sin th^b_ai cos xi^ab_i - cos th^i_ab
    std::vector<double> residuals;
    double max_residual = 0;
    int degenerate = 0;  // triples with a vanishing sine
};
DihedralCheck dihedral_4d_check(const TwistedSimplexGeometry& g, double degenerate_tol = 1e-9);

struct ShapeMatchFace {
    int a = 0, b = 0;
    double residual = 0;  // max over i,j of |alpha^{ab}_ij - alpha^{ba}_ji| up to the orientation shift
    bool matched = false;
    bool skipped = false;  // zero-area face
};
std::vector<ShapeMatchFace> shape_matching_check(const TwistedSimplexGeometry& g, double tol = 1e-9);
// Max spread over i of the oriented xi^ab_i.
double xi_spread(const TwistedSimplexGeometry& g);

// Moves the spinors by `size` along a random direction that keeps every
// tetrahedron closed and every face glued; generically breaks shape matching.
TwistedSimplexGeometry perturb_twisted(const TwistedSimplexGeometry& g, double size, std::mt19937_64& rng);

// 1 - Re S_onshell / ln sqrt(prod (J_a+1)! prod k!) for integer labels.
double stirling_log_ratio(const SimplexLabels& labels);

struct ScanRow {
    int lambda = 0;
    bool complete = false;
    BigRational twenty_j, fifteen_j, scale;
    double ratio = 0;         // twenty_j / (fifteen_j * prod ||S,T||^2/||S||^2)
    double gram_offdiag = 0;  // max normalized off-diagonal Gram entry between scaled base labels
    double stirling = 0;
};

struct ScanVerdicts {
    bool gram_decreasing = false;
    bool ratio_to_one = false;
    bool stirling_decreasing = false;
};

struct ScanResult {
    std::vector<ScanRow> rows;  // completed rows in the requested order
    int skipped = 0;            // rows dropped by the time budget
    ScanVerdicts verdicts;
};

SimplexLabels all_half_base();
// Rows run on up to `threads` workers; a row not started within the budget
// (seconds, 0 for none) is skipped.
ScanResult asymptotic_scan(const SimplexLabels& base, const std::vector<int>& lambdas, double time_budget_s = 0,
                           int threads = 1);

nlohmann::json tetrahedron_to_json(const FramedTetrahedron& t);
FramedTetrahedron tetrahedron_from_json(const nlohmann::json& j);
nlohmann::json simplex_to_json(const TwistedSimplexGeometry& g);
TwistedSimplexGeometry simplex_from_json(const nlohmann::json& j);
nlohmann::json spinors_to_json(const SpinorQuad& z);
SpinorQuad spinors_from_json(const nlohmann::json& j);

}  // namespace stnet
