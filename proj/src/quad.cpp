#include "sshock/quad.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "sshock/errors.hpp"

namespace sshock {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const ScalarFn& f, double a, double b, long& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;
  return {a, b, resk * half, std::abs((resk - resg) * half)};
}

}  // namespace

QuadResult quad_adaptive(const ScalarFn& f, double a, double b, double tol, int max_intervals) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Piece> heap;
  Piece first = gk15(f, a, b, out.evaluations);
  heap.push(first);
  double total = first.value;
  double err = first.error;
  int intervals = 1;
  while (!(err <= tol)) {
    if (intervals >= max_intervals || !std::isfinite(err)) {
      std::ostringstream msg;
      msg << "NoConvergence: quadrature on [" << a << ", " << b << "] error " << err
          << " above tol " << tol;
      throw NoConvergence(msg.str());
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Piece left = gk15(f, worst.a, mid, out.evaluations);
    Piece right = gk15(f, mid, worst.b, out.evaluations);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (!std::isfinite(total)) throw NoConvergence("NoConvergence: non-finite quadrature value");
  }
  // Re-sum to shed the running-update rounding.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = err;
  return out;
}

double quad(const ScalarFn& f, double a, double b, double tol) {
  return quad_adaptive(f, a, b, tol).value;
}

QuadResult quad_tail(const ScalarFn& f, double a, bool to_plus_inf, double rate, double tol,
                     double probe) {
  if (!(rate > 0.0)) throw std::invalid_argument("quad_tail: decay rate must be positive");
  const double dir = to_plus_inf ? 1.0 : -1.0;
  double x = a;
  for (int k = 0; k < 100000; ++k) {
    x += dir * probe;
    if (std::abs(f(x)) / rate < 0.25 * tol) break;
  }
  const double remainder = f(x) / rate;
  QuadResult body = to_plus_inf ? quad_adaptive(f, a, x, 0.5 * tol) : quad_adaptive(f, x, a, 0.5 * tol);
  body.value += remainder;
  body.error += std::abs(remainder);
  return body;
}

}  // namespace sshock
