// Adaptive Dormand-Prince 8(5,3) integrator with dense output and events.
//
// Coefficients are those of DOP853 (E. Hairer, S.P. Norsett, G. Wanner,
// Solving Ordinary Differential Equations I, 2nd ed., Springer 1993).

#include "sshock/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "sshock/errors.hpp"

namespace sshock {

namespace {

namespace c {
constexpr double c2 = 0.526001519587677318785587544488E-01;
constexpr double c3 = 0.789002279381515978178381316732E-01;
constexpr double c4 = 0.118350341907227396726757197510E+00;
constexpr double c5 = 0.281649658092772603273242802490E+00;
constexpr double c6 = 0.333333333333333333333333333333E+00;
constexpr double c7 = 0.25E+00;
constexpr double c8 = 0.307692307692307692307692307692E+00;
constexpr double c9 = 0.651282051282051282051282051282E+00;
constexpr double c10 = 0.6E+00;
constexpr double c11 = 0.857142857142857142857142857142E+00;
constexpr double c14 = 0.1E+00;
constexpr double c15 = 0.2E+00;
constexpr double c16 = 0.777777777777777777777777777778E+00;

constexpr double b1 = 5.42937341165687622380535766363E-2;
constexpr double b6 = 4.45031289275240888144113950566E0;
constexpr double b7 = 1.89151789931450038304281599044E0;
constexpr double b8 = -5.8012039600105847814672114227E0;
constexpr double b9 = 3.1116436695781989440891606237E-1;
constexpr double b10 = -1.52160949662516078556178806805E-1;
constexpr double b11 = 2.01365400804030348374776537501E-1;
constexpr double b12 = 4.47106157277725905176885569043E-2;

constexpr double bhh1 = 0.244094488188976377952755905512E+00;
constexpr double bhh2 = 0.733846688281611857341361741547E+00;
constexpr double bhh3 = 0.220588235294117647058823529412E-01;

constexpr double er1 = 0.1312004499419488073250102996E-01;
constexpr double er6 = -0.1225156446376204440720569753E+01;
constexpr double er7 = -0.4957589496572501915214079952E+00;
constexpr double er8 = 0.1664377182454986536961530415E+01;
constexpr double er9 = -0.3503288487499736816886487290E+00;
constexpr double er10 = 0.3341791187130174790297318841E+00;
constexpr double er11 = 0.8192320648511571246570742613E-01;
constexpr double er12 = -0.2235530786388629525884427845E-01;

constexpr double a21 = 5.26001519587677318785587544488E-2;
constexpr double a31 = 1.97250569845378994544595329183E-2;
constexpr double a32 = 5.91751709536136983633785987549E-2;
constexpr double a41 = 2.95875854768068491816892993775E-2;
constexpr double a43 = 8.87627564304205475450678981324E-2;
constexpr double a51 = 2.41365134159266685502369798665E-1;
constexpr double a53 = -8.84549479328286085344864962717E-1;
constexpr double a54 = 9.24834003261792003115737966543E-1;
constexpr double a61 = 3.7037037037037037037037037037E-2;
constexpr double a64 = 1.70828608729473871279604482173E-1;
constexpr double a65 = 1.25467687566822425016691814123E-1;
constexpr double a71 = 3.7109375E-2;
constexpr double a74 = 1.70252211019544039314978060272E-1;
constexpr double a75 = 6.02165389804559606850219397283E-2;
constexpr double a76 = -1.7578125E-2;
constexpr double a81 = 3.70920001185047927108779319836E-2;
constexpr double a84 = 1.70383925712239993810214054705E-1;
constexpr double a85 = 1.07262030446373284651809199168E-1;
constexpr double a86 = -1.53194377486244017527936158236E-2;
constexpr double a87 = 8.27378916381402288758473766002E-3;
constexpr double a91 = 6.24110958716075717114429577812E-1;
constexpr double a94 = -3.36089262944694129406857109825E0;
constexpr double a95 = -8.68219346841726006818189891453E-1;
constexpr double a96 = 2.75920996994467083049415600797E1;
constexpr double a97 = 2.01540675504778934086186788979E1;
constexpr double a98 = -4.34898841810699588477366255144E1;
constexpr double a101 = 4.77662536438264365890433908527E-1;
constexpr double a104 = -2.48811461997166764192642586468E0;
constexpr double a105 = -5.90290826836842996371446475743E-1;
constexpr double a106 = 2.12300514481811942347288949897E1;
constexpr double a107 = 1.52792336328824235832596922938E1;
constexpr double a108 = -3.32882109689848629194453265587E1;
constexpr double a109 = -2.03312017085086261358222928593E-2;
constexpr double a111 = -9.3714243008598732571704021658E-1;
constexpr double a114 = 5.18637242884406370830023853209E0;
constexpr double a115 = 1.09143734899672957818500254654E0;
constexpr double a116 = -8.14978701074692612513997267357E0;
constexpr double a117 = -1.85200656599969598641566180701E1;
constexpr double a118 = 2.27394870993505042818970056734E1;
constexpr double a119 = 2.49360555267965238987089396762E0;
constexpr double a1110 = -3.0467644718982195003823669022E0;
constexpr double a121 = 2.27331014751653820792359768449E0;
constexpr double a124 = -1.05344954667372501984066689879E1;
constexpr double a125 = -2.00087205822486249909675718444E0;
constexpr double a126 = -1.79589318631187989172765950534E1;
constexpr double a127 = 2.79488845294199600508499808837E1;
constexpr double a128 = -2.85899827713502369474065508674E0;
constexpr double a129 = -8.87285693353062954433549289258E0;
constexpr double a1210 = 1.23605671757943030647266201528E1;
constexpr double a1211 = 6.43392746015763530355970484046E-1;

constexpr double a141 = 5.61675022830479523392909219681E-2;
constexpr double a147 = 2.53500210216624811088794765333E-1;
constexpr double a148 = -2.46239037470802489917441475441E-1;
constexpr double a149 = -1.24191423263816360469010140626E-1;
constexpr double a1410 = 1.5329179827876569731206322685E-1;
constexpr double a1411 = 8.20105229563468988491666602057E-3;
constexpr double a1412 = 7.56789766054569976138603589584E-3;
constexpr double a1413 = -8.298E-3;
constexpr double a151 = 3.18346481635021405060768473261E-2;
constexpr double a156 = 2.83009096723667755288322961402E-2;
constexpr double a157 = 5.35419883074385676223797384372E-2;
constexpr double a158 = -5.49237485713909884646569340306E-2;
constexpr double a1511 = -1.08347328697249322858509316994E-4;
constexpr double a1512 = 3.82571090835658412954920192323E-4;
constexpr double a1513 = -3.40465008687404560802977114492E-4;
constexpr double a1514 = 1.41312443674632500278074618366E-1;
constexpr double a161 = -4.28896301583791923408573538692E-1;
constexpr double a166 = -4.69762141536116384314449447206E0;
constexpr double a167 = 7.68342119606259904184240953878E0;
constexpr double a168 = 4.06898981839711007970213554331E0;
constexpr double a169 = 3.56727187455281109270669543021E-1;
constexpr double a1613 = -1.39902416515901462129418009734E-3;
constexpr double a1614 = 2.9475147891527723389556272149E0;
constexpr double a1615 = -9.15095847217987001081870187138E0;

constexpr double d41 = -0.84289382761090128651353491142E+01;
constexpr double d46 = 0.56671495351937776962531783590E+00;
constexpr double d47 = -0.30689499459498916912797304727E+01;
constexpr double d48 = 0.23846676565120698287728149680E+01;
constexpr double d49 = 0.21170345824450282767155149946E+01;
constexpr double d410 = -0.87139158377797299206789907490E+00;
constexpr double d411 = 0.22404374302607882758541771650E+01;
constexpr double d412 = 0.63157877876946881815570249290E+00;
constexpr double d413 = -0.88990336451333310820698117400E-01;
constexpr double d414 = 0.18148505520854727256656404962E+02;
constexpr double d415 = -0.91946323924783554000451984436E+01;
constexpr double d416 = -0.44360363875948939664310572000E+01;
constexpr double d51 = 0.10427508642579134603413151009E+02;
constexpr double d56 = 0.24228349177525818288430175319E+03;
constexpr double d57 = 0.16520045171727028198505394887E+03;
constexpr double d58 = -0.37454675472269020279518312152E+03;
constexpr double d59 = -0.22113666853125306036270938578E+02;
constexpr double d510 = 0.77334326684722638389603898808E+01;
constexpr double d511 = -0.30674084731089398182061213626E+02;
constexpr double d512 = -0.93321305264302278729567221706E+01;
constexpr double d513 = 0.15697238121770843886131091075E+02;
constexpr double d514 = -0.31139403219565177677282850411E+02;
constexpr double d515 = -0.93529243588444783865713862664E+01;
constexpr double d516 = 0.35816841486394083752465898540E+02;
constexpr double d61 = 0.19985053242002433820987653617E+02;
constexpr double d66 = -0.38703730874935176555105901742E+03;
constexpr double d67 = -0.18917813819516756882830838328E+03;
constexpr double d68 = 0.52780815920542364900561016686E+03;
constexpr double d69 = -0.11573902539959630126141871134E+02;
constexpr double d610 = 0.68812326946963000169666922661E+01;
constexpr double d611 = -0.10006050966910838403183860980E+01;
constexpr double d612 = 0.77771377980534432092869265740E+00;
constexpr double d613 = -0.27782057523535084065932004339E+01;
constexpr double d614 = -0.60196695231264120758267380846E+02;
constexpr double d615 = 0.84320405506677161018159903784E+02;
constexpr double d616 = 0.11992291136182789328035130030E+02;
constexpr double d71 = -0.25693933462703749003312586129E+02;
constexpr double d76 = -0.15418974869023643374053993627E+03;
constexpr double d77 = -0.23152937917604549567536039109E+03;
constexpr double d78 = 0.35763911791061412378285349910E+03;
constexpr double d79 = 0.93405324183624310003907691704E+02;
constexpr double d710 = -0.37458323136451633156875139351E+02;
constexpr double d711 = 0.10409964950896230045147246184E+03;
constexpr double d712 = 0.29840293426660503123344363579E+02;
constexpr double d713 = -0.43533456590011143754432175058E+02;
constexpr double d714 = 0.96324553959188282948394950600E+02;
constexpr double d715 = -0.39177261675615439165231486172E+02;
constexpr double d716 = -0.14972683625798562581422125276E+03;
}  // namespace c

constexpr double kUround = 2.3e-16;

bool crosses(EventDirection dir, double g_prev, double g_new) {
  const bool up = g_prev < 0.0 && g_new >= 0.0;
  const bool down = g_prev > 0.0 && g_new <= 0.0;
  switch (dir) {
    case EventDirection::rising:
      return up;
    case EventDirection::falling:
      return down;
    case EventDirection::any:
      return up || down;
  }
  return false;
}

}  // namespace

class Dop853 {
 public:
  Dop853(const Field& field, std::size_t n, const IntegratorConfig& cfg)
      : field_(field), n_(n), cfg_(cfg) {
    for (auto& k : k_) k.assign(n, 0.0);
    y_.assign(n, 0.0);
    ynew_.assign(n, 0.0);
    tmp_.assign(n, 0.0);
    fnew_.assign(n, 0.0);
    rc_.assign(8 * n, 0.0);
  }

  Trajectory run(const Vec& y0, double t0, double t1, std::span<const EventSpec> events);

 private:
  void eval(double t, const Vec& y, Vec& out) {
    field_(t, std::span<const double>(y), std::span<double>(out));
  }
  double initial_step(double t, double hmax, double posneg);
  void stages(double t, double h);
  double error_norm(double h) const;
  void dense_coefficients(double t, double h);
  void dense_eval(double t0, double h, double t, double* out) const;

  const Field& field_;
  std::size_t n_;
  IntegratorConfig cfg_;

  // k_[0..11] are the twelve stages; k_[12..14] the extra dense-output stages.
  std::array<Vec, 15> k_;
  Vec y_, ynew_, tmp_, fnew_, rc_;
};

double Dop853::initial_step(double t, double hmax, double posneg) {
  const double atol = cfg_.abs_tol;
  const double rtol = cfg_.rel_tol;
  const Vec& f0 = k_[0];
  double dnf = 0.0;
  double dny = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sk = atol + rtol * std::abs(y_[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y_[i] / sk) * (y_[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax) * posneg;

  for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y_[i] + h * f0[i];
  eval(t + h, tmp_, k_[1]);
  double der2 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sk = atol + rtol * std::abs(y_[i]);
    const double d = (k_[1][i] - f0[i]) / sk;
    der2 += d * d;
  }
  der2 = std::sqrt(der2) / std::abs(h);
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 =
      der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.125);
  return std::min({100.0 * std::abs(h), h1, hmax}) * posneg;
}

void Dop853::stages(double t, double h) {
  using namespace c;
  auto& k = k_;
  const auto combo = [&](std::initializer_list<std::pair<double, const Vec*>> terms) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (const auto& [a, v] : terms) acc += a * (*v)[i];
      tmp_[i] = y_[i] + h * acc;
    }
  };
  combo({{a21, &k[0]}});
  eval(t + c2 * h, tmp_, k[1]);
  combo({{a31, &k[0]}, {a32, &k[1]}});
  eval(t + c3 * h, tmp_, k[2]);
  combo({{a41, &k[0]}, {a43, &k[2]}});
  eval(t + c4 * h, tmp_, k[3]);
  combo({{a51, &k[0]}, {a53, &k[2]}, {a54, &k[3]}});
  eval(t + c5 * h, tmp_, k[4]);
  combo({{a61, &k[0]}, {a64, &k[3]}, {a65, &k[4]}});
  eval(t + c6 * h, tmp_, k[5]);
  combo({{a71, &k[0]}, {a74, &k[3]}, {a75, &k[4]}, {a76, &k[5]}});
  eval(t + c7 * h, tmp_, k[6]);
  combo({{a81, &k[0]}, {a84, &k[3]}, {a85, &k[4]}, {a86, &k[5]}, {a87, &k[6]}});
  eval(t + c8 * h, tmp_, k[7]);
  combo({{a91, &k[0]}, {a94, &k[3]}, {a95, &k[4]}, {a96, &k[5]}, {a97, &k[6]}, {a98, &k[7]}});
  eval(t + c9 * h, tmp_, k[8]);
  combo({{a101, &k[0]},
         {a104, &k[3]},
         {a105, &k[4]},
         {a106, &k[5]},
         {a107, &k[6]},
         {a108, &k[7]},
         {a109, &k[8]}});
  eval(t + c10 * h, tmp_, k[9]);
  combo({{a111, &k[0]},
         {a114, &k[3]},
         {a115, &k[4]},
         {a116, &k[5]},
         {a117, &k[6]},
         {a118, &k[7]},
         {a119, &k[8]},
         {a1110, &k[9]}});
  eval(t + c11 * h, tmp_, k[10]);
  combo({{a121, &k[0]},
         {a124, &k[3]},
         {a125, &k[4]},
         {a126, &k[5]},
         {a127, &k[6]},
         {a128, &k[7]},
         {a129, &k[8]},
         {a1210, &k[9]},
         {a1211, &k[10]}});
  eval(t + h, tmp_, k[11]);

  for (std::size_t i = 0; i < n_; ++i) {
    const double incr = b1 * k[0][i] + b6 * k[5][i] + b7 * k[6][i] + b8 * k[7][i] +
                        b9 * k[8][i] + b10 * k[9][i] + b11 * k[10][i] + b12 * k[11][i];
    k[12][i] = incr;  // reused as scratch for the 8th-order increment
    ynew_[i] = y_[i] + h * incr;
  }
}

double Dop853::error_norm(double h) const {
  using namespace c;
  const auto& k = k_;
  double err = 0.0;
  double err2 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sk =
        1.0 / (cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew_[i])));
    const double e2 = (k[12][i] - bhh1 * k[0][i] - bhh2 * k[8][i] - bhh3 * k[11][i]) * sk;
    err2 += e2 * e2;
    const double e = (er1 * k[0][i] + er6 * k[5][i] + er7 * k[6][i] + er8 * k[7][i] +
                      er9 * k[8][i] + er10 * k[9][i] + er11 * k[10][i] + er12 * k[11][i]) *
                     sk;
    err += e * e;
  }
  double deno = err + 0.01 * err2;
  if (deno <= 0.0) deno = 1.0;
  return std::abs(h) * err * std::sqrt(1.0 / (deno * static_cast<double>(n_)));
}

void Dop853::dense_coefficients(double t, double h) {
  using namespace c;
  auto& k = k_;
  double* rc = rc_.data();
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    const double ydiff = ynew_[i] - y_[i];
    const double bspl = h * k[0][i] - ydiff;
    rc[i] = y_[i];
    rc[n + i] = ydiff;
    rc[2 * n + i] = bspl;
    rc[3 * n + i] = ydiff - h * fnew_[i] - bspl;
    rc[4 * n + i] = d41 * k[0][i] + d46 * k[5][i] + d47 * k[6][i] + d48 * k[7][i] +
                    d49 * k[8][i] + d410 * k[9][i] + d411 * k[10][i] + d412 * k[11][i];
    rc[5 * n + i] = d51 * k[0][i] + d56 * k[5][i] + d57 * k[6][i] + d58 * k[7][i] +
                    d59 * k[8][i] + d510 * k[9][i] + d511 * k[10][i] + d512 * k[11][i];
    rc[6 * n + i] = d61 * k[0][i] + d66 * k[5][i] + d67 * k[6][i] + d68 * k[7][i] +
                    d69 * k[8][i] + d610 * k[9][i] + d611 * k[10][i] + d612 * k[11][i];
    rc[7 * n + i] = d71 * k[0][i] + d76 * k[5][i] + d77 * k[6][i] + d78 * k[7][i] +
                    d79 * k[8][i] + d710 * k[9][i] + d711 * k[10][i] + d712 * k[11][i];
  }

  for (std::size_t i = 0; i < n; ++i) {
    tmp_[i] = y_[i] + h * (a141 * k[0][i] + a147 * k[6][i] + a148 * k[7][i] + a149 * k[8][i] +
                           a1410 * k[9][i] + a1411 * k[10][i] + a1412 * k[11][i] +
                           a1413 * fnew_[i]);
  }
  eval(t + c14 * h, tmp_, k[12]);
  for (std::size_t i = 0; i < n; ++i) {
    tmp_[i] = y_[i] + h * (a151 * k[0][i] + a156 * k[5][i] + a157 * k[6][i] + a158 * k[7][i] +
                           a1511 * k[10][i] + a1512 * k[11][i] + a1513 * fnew_[i] +
                           a1514 * k[12][i]);
  }
  eval(t + c15 * h, tmp_, k[13]);
  for (std::size_t i = 0; i < n; ++i) {
    tmp_[i] = y_[i] + h * (a161 * k[0][i] + a166 * k[5][i] + a167 * k[6][i] + a168 * k[7][i] +
                           a169 * k[8][i] + a1613 * fnew_[i] + a1614 * k[12][i] +
                           a1615 * k[13][i]);
  }
  eval(t + c16 * h, tmp_, k[14]);

  for (std::size_t i = 0; i < n; ++i) {
    rc[4 * n + i] =
        h * (rc[4 * n + i] + d413 * fnew_[i] + d414 * k[12][i] + d415 * k[13][i] + d416 * k[14][i]);
    rc[5 * n + i] =
        h * (rc[5 * n + i] + d513 * fnew_[i] + d514 * k[12][i] + d515 * k[13][i] + d516 * k[14][i]);
    rc[6 * n + i] =
        h * (rc[6 * n + i] + d613 * fnew_[i] + d614 * k[12][i] + d615 * k[13][i] + d616 * k[14][i]);
    rc[7 * n + i] =
        h * (rc[7 * n + i] + d713 * fnew_[i] + d714 * k[12][i] + d715 * k[13][i] + d716 * k[14][i]);
  }
}

void Dop853::dense_eval(double t0, double h, double t, double* out) const {
  const double s = (t - t0) / h;
  const double s1 = 1.0 - s;
  const std::size_t n = n_;
  const double* rc = rc_.data();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = rc[i] +
             s * (rc[n + i] +
                  s1 * (rc[2 * n + i] +
                        s * (rc[3 * n + i] +
                             s1 * (rc[4 * n + i] +
                                   s * (rc[5 * n + i] + s1 * (rc[6 * n + i] + s * rc[7 * n + i]))))));
  }
}

Trajectory Dop853::run(const Vec& y0, double t0, double t1, std::span<const EventSpec> events) {
  if (y0.size() != n_) throw std::invalid_argument("integrate: state dimension mismatch");
  if (!(cfg_.rel_tol > 0.0 && cfg_.abs_tol > 0.0)) {
    throw std::invalid_argument("integrate: tolerances must be positive");
  }
  Trajectory traj;
  traj.dim_ = n_;
  traj.times_.push_back(t0);
  traj.states_.push_back(y0);
  if (t0 == t1) return traj;

  const double posneg = t1 > t0 ? 1.0 : -1.0;
  const double hmax = std::min(std::abs(t1 - t0), cfg_.max_step);
  y_ = y0;
  double t = t0;

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    g_prev[e] = events[e].function(t, std::span<const double>(y_));
  }

  eval(t, y_, k_[0]);
  double h = initial_step(t, hmax, posneg);
  double facold = 1e-4;
  bool reject = false;
  bool last = false;
  long nstep = 0;
  const double expo1 = 1.0 / 8.0;
  const double facc1 = 3.0;        // 1/fac1
  const double facc2 = 1.0 / 6.0;  // 1/fac2
  const double safe = 0.9;

  while (true) {
    if (++nstep > cfg_.max_steps) {
      std::ostringstream msg;
      msg << "StepLimitExceeded: more than " << cfg_.max_steps << " steps at t=" << t;
      throw StepLimitExceeded(msg.str());
    }
    if (0.1 * std::abs(h) <= std::abs(t) * kUround || h == 0.0) {
      std::ostringstream msg;
      msg << "StepLimitExceeded: step size underflow at t=" << t;
      throw StepLimitExceeded(msg.str());
    }
    if ((t + 1.01 * h - t1) * posneg > 0.0) {
      h = t1 - t;
      last = true;
    }

    stages(t, h);
    double err = error_norm(h);
    if (!std::isfinite(err)) {
      h *= 0.25;
      reject = true;
      last = false;
      continue;
    }
    const double fac11 = std::pow(err, expo1);
    const double fac = std::max(facc2, std::min(facc1, fac11 / safe));
    double hnew = h / fac;

    if (err > 1.0) {
      hnew = h / std::min(facc1, fac11 / safe);
      reject = true;
      last = false;
      h = hnew;
      continue;
    }

    facold = std::max(err, 1e-4);
    (void)facold;
    const double tph = t + h;
    eval(tph, ynew_, fnew_);
    dense_coefficients(t, h);

    double ymax = 0.0;
    bool finite = true;
    for (double v : ynew_) {
      finite = finite && std::isfinite(v);
      ymax = std::max(ymax, std::abs(v));
    }
    if (!finite || ymax > cfg_.blowup_norm) {
      std::ostringstream msg;
      msg << "BlowUp: state norm " << ymax << " exceeds bound at t=" << tph;
      throw BlowUp(msg.str());
    }

    // Events on [t, tph].
    struct Hit {
      double t;
      std::size_t id;
    };
    std::vector<Hit> hits;
    std::vector<double> g_new(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) {
      g_new[e] = events[e].function(tph, std::span<const double>(ynew_));
      if (!crosses(events[e].direction, g_prev[e], g_new[e])) continue;
      double a = t, ga = g_prev[e];
      double b = tph, gb = g_new[e];
      double root = b;
      int side = 0;
      for (int it = 0; it < 200; ++it) {
        double cpt = b - gb * (b - a) / (gb - ga);
        if (!(cpt > std::min(a, b) && cpt < std::max(a, b))) cpt = 0.5 * (a + b);
        dense_eval(t, h, cpt, tmp_.data());
        const double gc = events[e].function(cpt, std::span<const double>(tmp_));
        root = cpt;
        if (std::abs(gc) < cfg_.event_tol) break;
        if ((gc > 0.0) == (gb > 0.0)) {
          b = cpt;
          gb = gc;
          if (side == -1) ga *= 0.5;
          side = -1;
        } else {
          a = cpt;
          ga = gc;
          if (side == 1) gb *= 0.5;
          side = 1;
        }
        if (std::abs(b - a) <= 4.0 * kUround * std::max(1.0, std::abs(root))) break;
      }
      hits.push_back({root, e});
    }
    std::sort(hits.begin(), hits.end(),
              [posneg](const Hit& x, const Hit& y) { return (x.t - y.t) * posneg < 0.0; });

    traj.seg_t0_.push_back(t);
    traj.seg_h_.push_back(h);
    traj.dense_.insert(traj.dense_.end(), rc_.begin(), rc_.end());

    bool stop = false;
    for (const Hit& hit : hits) {
      EventRecord rec;
      rec.t = hit.t;
      rec.id = static_cast<int>(hit.id);
      rec.y.assign(n_, 0.0);
      dense_eval(t, h, hit.t, rec.y.data());
      traj.events_.push_back(rec);
      if (events[hit.id].terminal) {
        traj.times_.push_back(rec.t);
        traj.states_.push_back(rec.y);
        stop = true;
        break;
      }
    }
    if (stop) return traj;

    traj.times_.push_back(tph);
    traj.states_.push_back(ynew_);
    g_prev = g_new;
    k_[0] = fnew_;
    y_ = ynew_;
    t = tph;
    if (last) return traj;

    if (std::abs(hnew) > hmax) hnew = posneg * hmax;
    if (reject) hnew = posneg * std::min(std::abs(hnew), std::abs(h));
    reject = false;
    h = hnew;
  }
}

std::size_t Trajectory::locate(double t) const {
  if (times_.size() < 2) throw std::out_of_range("Trajectory::at: no steps recorded");
  const double dir = times_.back() > times_.front() ? 1.0 : -1.0;
  const double lo = dir > 0 ? times_.front() : times_.back();
  const double hi = dir > 0 ? times_.back() : times_.front();
  if (t < lo || t > hi) throw std::out_of_range("Trajectory::at: time outside span");
  // First index whose time is beyond t in the direction of integration.
  auto it = std::upper_bound(times_.begin(), times_.end(), t,
                             [dir](double value, double elem) { return value * dir < elem * dir; });
  std::size_t idx = static_cast<std::size_t>(it - times_.begin());
  if (idx == 0) idx = 1;
  if (idx >= times_.size()) idx = times_.size() - 1;
  return idx - 1;
}

void Trajectory::eval_segment(std::size_t seg, double t, double* out) const {
  const std::size_t n = dim_;
  const double* rc = dense_.data() + seg * 8 * n;
  const double s = (t - seg_t0_[seg]) / seg_h_[seg];
  const double s1 = 1.0 - s;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = rc[i] +
             s * (rc[n + i] +
                  s1 * (rc[2 * n + i] +
                        s * (rc[3 * n + i] +
                             s1 * (rc[4 * n + i] +
                                   s * (rc[5 * n + i] + s1 * (rc[6 * n + i] + s * rc[7 * n + i]))))));
  }
}

Vec Trajectory::at(double t) const {
  if (times_.size() == 1 && t == times_.front()) return states_.front();
  const std::size_t seg = locate(t);
  if (t == times_[seg]) return states_[seg];
  if (t == times_[seg + 1]) return states_[seg + 1];
  Vec out(dim_);
  eval_segment(seg, t, out.data());
  return out;
}

double Trajectory::at(double t, std::size_t component) const { return at(t).at(component); }

std::vector<EventRecord> Trajectory::events_with_id(int id) const {
  std::vector<EventRecord> out;
  for (const auto& e : events_) {
    if (e.id == id) out.push_back(e);
  }
  return out;
}

void Trajectory::sample(int per_step, std::vector<double>& t_out, std::vector<Vec>& y_out) const {
  t_out.clear();
  y_out.clear();
  if (times_.empty()) return;
  per_step = std::max(per_step, 1);
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    t_out.push_back(times_[i]);
    y_out.push_back(states_[i]);
    for (int j = 1; j < per_step; ++j) {
      const double tj = times_[i] + (times_[i + 1] - times_[i]) * j / per_step;
      Vec y(dim_);
      eval_segment(i, tj, y.data());
      t_out.push_back(tj);
      y_out.push_back(std::move(y));
    }
  }
  t_out.push_back(times_.back());
  y_out.push_back(states_.back());
}

Trajectory integrate(const Field& field, const Vec& y0, double t0, double t1,
                     const IntegratorConfig& cfg, std::span<const EventSpec> events) {
  Dop853 solver(field, y0.size(), cfg);
  return solver.run(y0, t0, t1, events);
}

}  // namespace sshock
