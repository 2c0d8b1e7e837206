#include "npd/spectral.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "npd/errors.hpp"

namespace npd::spectral {

namespace {

// Plans are created once per (shape, direction) and executed through the
// new-array interface, which is thread-safe. FFTW_UNALIGNED keeps results
// independent of buffer alignment so repeated runs are bit-identical.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(const Grid& grid, int sign) {
        const auto shape = grid.shape();
        const auto key = std::make_tuple(grid.dim(), shape[0], shape[1], shape[2], sign);
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<Complex> in(grid.size()), out(grid.size());
        fftw_plan plan = fftw_plan_dft(grid.dim(), shape.data(), reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int, int, int>, fftw_plan> plans_;
};

void execute(const Grid& grid, int sign, const std::vector<Complex>& in, std::vector<Complex>& out) {
    fftw_plan plan = PlanCache::instance().get(grid, sign);
    // FFTW does not write to the input of an out-of-place c2c transform.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

SpectralField forward_transform(const RealField& f) {
    if (const auto bad = f.first_non_finite(); bad != f.size()) {
        std::ostringstream os;
        os << "forward_transform: non-finite value " << f[bad] << " at flat index " << bad;
        throw PreconditionError(os.str());
    }
    const Grid& grid = f.grid();
    std::vector<Complex> in(grid.size());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = Complex(f[i], 0.0);
    std::vector<Complex> out(grid.size());
    execute(grid, FFTW_FORWARD, in, out);
    // Average each coefficient with the conjugate of its partner so the
    // result is Hermitian to the last bit; every later operation keeps it so.
    const double half_scale = 0.5 / static_cast<double>(grid.size());
    const auto conj = grid.conjugate_index();
    std::vector<Complex> sym(grid.size());
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = (out[i] + std::conj(out[conj[i]])) * half_scale;
    return SpectralField(f.grid_ptr(), std::move(sym));
}

RealField inverse_transform(const SpectralField& fhat) {
    if (const double defect = fhat.hermitian_defect(); defect > kHermitianTolerance) {
        std::ostringstream os;
        os << "inverse_transform: coefficients violate Hermitian symmetry (relative defect " << defect << ")";
        throw PreconditionError(os.str());
    }
    const Grid& grid = fhat.grid();
    std::vector<Complex> in(fhat.coeffs().begin(), fhat.coeffs().end());
    std::vector<Complex> out(grid.size());
    execute(grid, FFTW_BACKWARD, in, out);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = out[i].real();
    return RealField(fhat.grid_ptr(), std::move(values));
}

SpectralField derivative(const SpectralField& fhat, int axis) {
    const auto kd = fhat.grid().derivative_wavenumber(axis);
    SpectralField out(fhat.grid_ptr());
    auto o = out.coeffs();
    auto in = fhat.coeffs();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = Complex(-kd[i] * in[i].imag(), kd[i] * in[i].real());
    return out;
}

VectorSpectral gradient(const SpectralField& fhat) {
    VectorSpectral out;
    out.reserve(fhat.grid().dim());
    for (int a = 0; a < fhat.grid().dim(); ++a) out.push_back(derivative(fhat, a));
    return out;
}

SpectralField laplacian(const SpectralField& fhat) {
    const auto k2 = fhat.grid().k_squared();
    SpectralField out(fhat.grid_ptr());
    auto o = out.coeffs();
    auto in = fhat.coeffs();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = -k2[i] * in[i];
    return out;
}

SpectralField divergence(std::span<const SpectralField> vhat) {
    if (vhat.empty()) throw PreconditionError("divergence: empty vector field");
    const Grid& grid = vhat[0].grid();
    if (vhat.size() != static_cast<std::size_t>(grid.dim())) {
        throw PreconditionError("divergence: component count does not match the grid dimension");
    }
    SpectralField out(vhat[0].grid_ptr());
    auto o = out.coeffs();
    for (int a = 0; a < grid.dim(); ++a) {
        const auto kd = grid.derivative_wavenumber(a);
        auto in = vhat[a].coeffs();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] += Complex(-kd[i] * in[i].imag(), kd[i] * in[i].real());
    }
    return out;
}

void dealias_in_place(SpectralField& fhat) noexcept {
    const auto keep = fhat.grid().dealias_mask();
    auto c = fhat.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!keep[i]) c[i] = Complex(0.0, 0.0);
    }
}

SpectralField dealias(const SpectralField& fhat) {
    SpectralField out = fhat;
    dealias_in_place(out);
    return out;
}

SpectralField solve_poisson(const SpectralField& rho_hat, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw PreconditionError("solve_poisson: epsilon must be positive and finite");
    }
    const auto c = rho_hat.coeffs();
    double power = 0.0;
    for (const auto& v : c) power += std::norm(v);
    const double mean = c[0].real();
    if (std::abs(c[0]) > kNeutralityTolerance * std::sqrt(power)) {
        std::ostringstream os;
        os.precision(17);
        os << "solve_poisson: charge is not neutral, mean(rho) = " << mean << " (rms " << std::sqrt(power) << ")";
        throw PreconditionError(os.str());
    }
    const auto k2 = rho_hat.grid().k_squared();
    SpectralField phi(rho_hat.grid_ptr());
    auto p = phi.coeffs();
    for (std::size_t i = 1; i < p.size(); ++i) p[i] = c[i] / (epsilon * k2[i]);
    return phi;
}

VectorSpectral leray_project(std::span<const SpectralField> fhat) {
    if (fhat.empty()) throw PreconditionError("leray_project: empty vector field");
    const Grid& grid = fhat[0].grid();
    const int d = grid.dim();
    if (fhat.size() != static_cast<std::size_t>(d)) {
        throw PreconditionError("leray_project: component count does not match the grid dimension");
    }
    VectorSpectral out(fhat.begin(), fhat.end());
    std::array<std::span<const double>, 3> kd{};
    for (int a = 0; a < d; ++a) kd[a] = grid.derivative_wavenumber(a);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double kk = 0.0;
        for (int a = 0; a < d; ++a) kk += kd[a][i] * kd[a][i];
        if (kk == 0.0) continue;
        Complex kdotf(0.0, 0.0);
        for (int a = 0; a < d; ++a) kdotf += kd[a][i] * fhat[a][i];
        const Complex s = kdotf / kk;
        for (int a = 0; a < d; ++a) out[a][i] -= kd[a][i] * s;
    }
    return out;
}

double parseval_norm_squared(const SpectralField& fhat) {
    double s = 0.0;
    for (const auto& c : fhat.coeffs()) s += std::norm(c);
    return fhat.grid().volume() * s;
}

double inner_product(const SpectralField& a, const SpectralField& b) {
    double s = 0.0;
    auto x = a.coeffs();
    auto y = b.coeffs();
    for (std::size_t i = 0; i < x.size(); ++i) s += (std::conj(x[i]) * y[i]).real();
    return a.grid().volume() * s;
}

}  // namespace npd::spectral
