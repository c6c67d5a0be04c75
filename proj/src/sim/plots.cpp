#include "loglin/sim/plots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "loglin/errors.hpp"

namespace loglin::sim {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 240.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 170.0;  // room for the legend
constexpr double kTop = 50.0;
constexpr double kGap = 55.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double x, int decimals = 2) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

std::string tick_label(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-300 + 1e-12 * std::abs(hi)) {
      const double d = std::max(std::abs(hi) * 0.1, 1e-12);
      lo -= d;
      hi += d;
    }
  }
};

double transform_y(double y, bool log_y) {
  if (!log_y) return y;
  return y > 0.0 ? std::log10(y) : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::vector<Panel>& panels) {
  const double height =
      kTop + static_cast<double>(panels.size()) * (kPanelHeight + kGap) - kGap + kBottom;
  const double plot_w = kWidth - kLeft - kRight;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, 0) +
         "\" height=\"" + num(height, 0) + "\" viewBox=\"0 0 " + num(kWidth, 0) + " " +
         num(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2, 1) + "\" y=\"24\" text-anchor=\"middle\" " +
         "font-size=\"16\">" + escape(title) + "</text>\n";

  Range xr;
  for (const Panel& p : panels) {
    for (const Series& s : p.series) {
      for (double x : s.x) xr.add(x);
    }
  }
  xr.pad();
  const double xstep = nice_step(xr.hi - xr.lo);

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    const double top = kTop + static_cast<double>(pi) * (kPanelHeight + kGap);
    Range yr;
    for (const Series& s : panel.series) {
      for (double y : s.y) yr.add(transform_y(y, panel.log_y));
    }
    for (double y : panel.reference_lines) yr.add(transform_y(y, panel.log_y));
    // Log panels show at most 16 decades; smaller values sit on the bottom edge.
    if (panel.log_y && std::isfinite(yr.hi)) yr.lo = std::max(yr.lo, std::floor(yr.hi) - 16.0);
    yr.pad();
    const double ystep = panel.log_y ? std::max(1.0, std::ceil((yr.hi - yr.lo) / 6.0))
                                     : nice_step(yr.hi - yr.lo);
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) {
      return top + kPanelHeight - (y - yr.lo) / (yr.hi - yr.lo) * kPanelHeight;
    };

    svg += "<g>\n<text x=\"" + num(kLeft, 1) + "\" y=\"" + num(top - 8, 1) + "\">" +
           escape(panel.title) + "</text>\n";
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
           "\" height=\"" + num(kPanelHeight) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double y = std::ceil(yr.lo / ystep) * ystep; y <= yr.hi + 1e-9 * ystep; y += ystep) {
      svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(y)) + "\" x2=\"" +
             num(kLeft + plot_w) + "\" y2=\"" + num(py(y)) + "\" stroke=\"#e5e5e5\"/>\n";
      const std::string label =
          panel.log_y ? "1e" + num(y, 0) : tick_label(std::abs(y) < 1e-12 * ystep ? 0.0 : y);
      svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(y) + 4) +
             "\" text-anchor=\"end\">" + label + "</text>\n";
    }
    for (double x = std::ceil(xr.lo / xstep) * xstep; x <= xr.hi + 1e-9 * xstep; x += xstep) {
      svg += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(px(x)) +
             "\" y2=\"" + num(top + kPanelHeight) + "\" stroke=\"#e5e5e5\"/>\n";
      svg += "<text x=\"" + num(px(x)) + "\" y=\"" + num(top + kPanelHeight + 16) +
             "\" text-anchor=\"middle\">" + tick_label(x) + "</text>\n";
    }
    svg += "<text transform=\"translate(" + num(22) + "," + num(top + kPanelHeight / 2) +
           ") rotate(-90)\" text-anchor=\"middle\">" + escape(panel.y_label) + "</text>\n";
    for (double ref : panel.reference_lines) {
      const double y = py(transform_y(ref, panel.log_y));
      svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" +
             num(kLeft + plot_w) + "\" y2=\"" + num(y) +
             "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
      svg += "<text x=\"" + num(kLeft + plot_w - 4) + "\" y=\"" + num(y - 4) +
             "\" text-anchor=\"end\">y = " +
             tick_label(ref) + "</text>\n";
    }
    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const Series& s = panel.series[si];
      const char* color = kColors[si % kColors.size()];
      std::string pts;
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        double y = transform_y(s.y[i], panel.log_y);
        if (panel.log_y) y = std::max(y, yr.lo);
        if (!std::isfinite(y) || !std::isfinite(s.x[i])) continue;
        if (!pts.empty()) pts += ' ';
        pts += num(px(s.x[i])) + "," + num(py(y));
      }
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
      const double ly = top + 14 + 16 * static_cast<double>(si);
      svg += "<line x1=\"" + num(kLeft + plot_w + 8) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
             num(kLeft + plot_w + 28) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
      svg += "<text x=\"" + num(kLeft + plot_w + 32) + "\" y=\"" + num(ly) + "\">" +
             escape(s.label) + "</text>\n";
    }
    svg += "</g>\n";
  }
  svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(height - 12) +
         "\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

namespace {

std::vector<double> hours(const Table& t) {
  std::vector<double> h = t.column("t_s");
  for (double& x : h) x /= 3600.0;
  return h;
}

std::vector<double> scaled(std::vector<double> v, double k) {
  for (double& x : v) x *= k;
  return v;
}

// Per-row Euclidean norm of three columns.
std::vector<double> norm3(const Table& t, const std::string& prefix) {
  const std::size_t j = t.column_index(prefix + "_x");
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back(std::hypot(r[j], r[j + 1], r[j + 2]));
  return out;
}

Panel component_panel(const Table& t, const std::vector<double>& x, const std::string& slot,
                      const std::string& title, const std::string& unit, double k) {
  Panel p{title, unit, {}, {}, false};
  for (const char* c : {"x", "y", "z"}) {
    p.series.push_back({slot + " " + c, x, scaled(t.column("classical_" + slot + "_" + c), k)});
  }
  p.series.push_back({"norm", x, scaled(norm3(t, "classical_" + slot), k)});
  return p;
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const Table& t, Mode mode,
                                              const std::filesystem::path& out_dir) {
  if (t.rows.empty()) {
    throw IoError("cannot plot " + to_string(mode) + " artifacts: table has 0 data rows");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const std::vector<double> x = hours(t);
  const std::string xl = "time [h]";
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& file, const std::string& title,
                  const std::vector<Panel>& panels) {
    const auto path = out_dir / file;
    write_text(path, render_svg(title, xl, panels));
    written.push_back(path);
  };

  switch (mode) {
    case Mode::validate: {
      emit("log_error.svg", "Log tracking error",
           {component_panel(t, x, "pos", "Position error", "km", 1e-3),
            component_panel(t, x, "vel", "Velocity error", "m/s", 1.0),
            component_panel(t, x, "rot", "Attitude error", "rad", 1.0)});
      emit("residual.svg", "Classical vs. log-error propagation residual",
           {Panel{"Position residual", "m", {{"|d pos|", x, norm3(t, "delta_pos")}}, {}, false},
            Panel{"Velocity residual", "m/s", {{"|d vel|", x, norm3(t, "delta_vel")}}, {}, false},
            Panel{"Attitude residual", "rad", {{"|d rot|", x, norm3(t, "delta_rot")}}, {}, false}});
      break;
    }
    case Mode::bound: {
      emit("bound_ratio.svg", "Gravity mismatch vs. bound",
           {Panel{"Mismatch and pointwise bound",
                  "m/s^2",
                  {{"actual", x, t.column("actual_mismatch_m_s2")},
                   {"bound", x, t.column("pointwise_bound_m_s2")}},
                  {},
                  false},
            Panel{"Ratio actual / bound", "ratio", {{"ratio", x, t.column("ratio")}}, {1.0}, false}});
      break;
    }
    case Mode::stabilize: {
      emit("stabilize.svg", "Log error under inversion and feedback",
           {Panel{"Inversion only",
                  "|xi|",
                  {{"truth", x, t.column("xi_norm_inversion")},
                   {"linear", x, t.column("xi_norm_inversion_linear")}},
                  {},
                  false},
            Panel{"Inversion + feedback",
                  "|xi|",
                  {{"truth", x, t.column("xi_norm_closed_loop")},
                   {"linear", x, t.column("xi_norm_closed_loop_linear")},
                   {"envelope", x, t.column("envelope")}},
                  {},
                  true}});
      break;
    }
  }
  return written;
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv, Mode mode,
                                              const std::filesystem::path& out_dir) {
  return emit_plots(read_csv(csv), mode, out_dir);
}

}  // namespace loglin::sim
