#include "pace/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pace/json_io.hpp"

namespace pace {

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw MissingMetrics("missing file " + file.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    fields.push_back(std::move(field));
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::vector<EpochRow> load_metrics(const std::filesystem::path& file) {
  const auto rows = read_csv(file);
  std::vector<EpochRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() < 8) throw MissingMetrics("malformed metrics row in " + file.string());
    EpochRow r;
    r.step = std::stoi(f[0]);
    r.epoch = std::stoi(f[1]);
    r.train_loss = std::stod(f[2]);
    r.train_reward = std::stod(f[3]);
    r.test_reward = std::stod(f[4]);
    r.avg_complexity = std::stod(f[5]);
    r.lexicon_size = std::stoi(f[6]);
    r.cumulative_regret = std::stod(f[7]);
    out.push_back(r);
  }
  return out;
}

std::vector<QTraceRow> load_qtrace(const std::filesystem::path& file) {
  const auto rows = read_csv(file);
  std::vector<QTraceRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() < 5) throw MissingMetrics("malformed qtrace row in " + file.string());
    QTraceRow r;
    r.step = std::stoi(f[0]);
    r.epoch = std::stoi(f[1]);
    r.action = std::stoi(f[2]);
    r.q = std::stod(f[3]);
    r.usage = std::stol(f[4]);
    out.push_back(r);
  }
  return out;
}

std::string ascii_grid(const Grid& grid) {
  std::string out;
  for (int row = Grid::kSide - 1; row >= 0; --row) {
    for (int col = 0; col < Grid::kSide; ++col) {
      out.push_back(grid.test({col, row}) ? '#' : '.');
    }
    out.push_back('\n');
  }
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series) {
  constexpr double kWidth = 720, kHeight = 420;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const ChartSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kHeight - kBottom - (y - ymin) / (ymax - ymin) * plot_h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(title) << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 18 " << kHeight / 2 << ")\">" << xml_escape(y_label)
      << "</text>\n";
  out << "<text x=\"" << kLeft - 6 << "\" y=\"" << kHeight - kBottom + 4
      << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(ymin) << "</text>\n";
  out << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4
      << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(ymax) << "</text>\n";
  out << "<text x=\"" << kLeft << "\" y=\"" << kHeight - kBottom + 16
      << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(xmin) << "</text>\n";
  out << "<text x=\"" << kWidth - kRight << "\" y=\"" << kHeight - kBottom + 16
      << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(xmax) << "</text>\n";

  double legend_y = kTop + 6;
  for (const ChartSeries& s : series) {
    if (!s.points.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) out << " ";
        out << fmt(sx(s.points[i].first)) << "," << fmt(sy(s.points[i].second));
      }
      out << "\"/>\n";
    }
    out << "<rect x=\"" << kWidth - kRight - 150 << "\" y=\"" << legend_y - 8
        << "\" width=\"12\" height=\"3\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 132 << "\" y=\"" << legend_y
        << "\" font-size=\"11\">" << xml_escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
  return out.str();
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string svg_program_render(const nlohmann::json& example, const Lexicon& lexicon) {
  constexpr double kCellPx = 18;
  constexpr double kPad = 14;
  const double grid_px = kCellPx * Grid::kSide;
  const double panel_w = grid_px + 2 * kPad;

  std::ostringstream out;
  std::vector<std::pair<std::string, Program>> panels;
  Program initial, final_program;
  example.at("initial_program").get_to(initial);
  example.at("final_program").get_to(final_program);
  panels.push_back({"initial (" + std::to_string(initial.length()) + " actions)", initial});
  panels.push_back({"final (" + std::to_string(final_program.length()) + " actions)",
                    final_program});

  const double width = panel_w * 2;
  const double height = grid_px + 2 * kPad + 22;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  for (std::size_t panel = 0; panel < panels.size(); ++panel) {
    const double ox = panel_w * static_cast<double>(panel) + kPad;
    const double oy = kPad + 18;
    out << "<text x=\"" << ox << "\" y=\"" << kPad + 6 << "\" font-size=\"11\">"
        << xml_escape(panels[panel].first) << "</text>\n";
    for (int i = 0; i <= Grid::kSide; ++i) {
      out << "<line x1=\"" << ox << "\" y1=\"" << oy + i * kCellPx << "\" x2=\""
          << ox + grid_px << "\" y2=\"" << oy + i * kCellPx
          << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
      out << "<line x1=\"" << ox + i * kCellPx << "\" y1=\"" << oy << "\" x2=\""
          << ox + i * kCellPx << "\" y2=\"" << oy + grid_px
          << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    }
    const Program& program = panels[panel].second;
    for (std::size_t step = 0; step < program.steps.size(); ++step) {
      const std::string color = kPalette[step % 10];
      for (const PrimitiveBlock& b : flatten_step(program.steps[step], lexicon)) {
        for (Cell c : b.cells()) {
          const double x = ox + c.col * kCellPx;
          const double y = oy + (Grid::kSide - 1 - c.row) * kCellPx;
          out << "<rect x=\"" << x + 1 << "\" y=\"" << y + 1 << "\" width=\"" << kCellPx - 2
              << "\" height=\"" << kCellPx - 2 << "\" fill=\"" << color << "\"/>\n";
        }
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

Lexicon lexicon_from_file(const std::filesystem::path& file) {
  Lexicon lexicon = initial_lexicon();
  std::ifstream in(file);
  if (!in) return lexicon;
  nlohmann::json j;
  in >> j;
  for (const nlohmann::json& ja : j) {
    const int id = ja.at("id").get<int>();
    if (id < 2) continue;
    std::vector<ExpansionStep> expansion;
    ja.at("expansion").get_to(expansion);
    lexicon.push_back(
        make_abstraction(id, ja.at("name").get<std::string>(), expansion, lexicon));
  }
  return lexicon;
}

void write_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file);
  if (!out) throw GridError("cannot write " + file.string());
  out << content;
}

}  // namespace

void render_report(const std::filesystem::path& run_dir) {
  const std::vector<EpochRow> metrics = load_metrics(run_dir / "metrics.csv");
  if (metrics.empty()) throw MissingMetrics("metrics.csv has no rows");

  const std::filesystem::path out_dir = run_dir / "report";
  std::filesystem::create_directories(out_dir);

  ChartSeries complexity{"avg_complexity", "#1f77b4", {}};
  ChartSeries test_reward{"test_reward", "#2ca02c", {}};
  ChartSeries train_reward{"train_reward", "#ff7f0e", {}};
  ChartSeries regret{"cumulative_regret", "#d62728", {}};
  ChartSeries lexicon{"lexicon_size", "#9467bd", {}};
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const double x = static_cast<double>(i);
    complexity.points.push_back({x, metrics[i].avg_complexity});
    test_reward.points.push_back({x, metrics[i].test_reward});
    train_reward.points.push_back({x, metrics[i].train_reward});
    regret.points.push_back({x, metrics[i].cumulative_regret});
    lexicon.points.push_back({x, static_cast<double>(metrics[i].lexicon_size)});
  }
  write_file(out_dir / "complexity.svg",
             svg_line_chart("Average program length", "epoch", "actions", {complexity}));
  write_file(out_dir / "reward.svg",
             svg_line_chart("Reconstruction accuracy", "epoch", "reward",
                            {test_reward, train_reward}));
  write_file(out_dir / "regret.svg",
             svg_line_chart("Cumulative regret", "epoch", "regret", {regret}));
  write_file(out_dir / "lexicon.svg",
             svg_line_chart("Lexicon size", "epoch", "actions", {lexicon}));

  if (std::filesystem::exists(run_dir / "composition.csv")) {
    const auto rows = read_csv(run_dir / "composition.csv");
    ChartSeries prim{"primitives", "#1f77b4", {}};
    ChartSeries shape{"shapes", "#2ca02c", {}};
    ChartSeries sub{"sub-shapes", "#ff7f0e", {}};
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double x = std::stod(rows[i][0]);
      prim.points.push_back({x, std::stod(rows[i][1])});
      shape.points.push_back({x, std::stod(rows[i][2])});
      sub.points.push_back({x, std::stod(rows[i][3])});
    }
    write_file(out_dir / "composition.svg",
               svg_line_chart("Language composition", "step", "fraction", {prim, shape, sub}));
  }

  if (std::filesystem::exists(run_dir / "adoption_rates.csv")) {
    const auto rows = read_csv(run_dir / "adoption_rates.csv");
    ChartSeries rate{"adoption rate", "#1f77b4", {}};
    for (std::size_t i = 1; i < rows.size(); ++i) {
      rate.points.push_back({std::stod(rows[i][0]), std::stod(rows[i][1])});
    }
    std::vector<ChartSeries> series{rate};
    if (std::filesystem::exists(run_dir / "frontier.csv")) {
      const auto frows = read_csv(run_dir / "frontier.csv");
      ChartSeries frontier{"frontier avg length", "#d62728", {}};
      for (std::size_t i = 1; i < frows.size(); ++i) {
        frontier.points.push_back({std::stod(frows[i][0]), std::stod(frows[i][1])});
      }
      series.push_back(frontier);
    }
    write_file(out_dir / "adoption.svg",
               svg_line_chart("Adoption by language size", "lexicon size", "rate", series));
  }

  if (std::filesystem::exists(run_dir / "program_examples.json")) {
    const Lexicon lexicon = lexicon_from_file(run_dir / "lexicon.json");
    std::ifstream in(run_dir / "program_examples.json");
    nlohmann::json examples;
    in >> examples;
    std::ostringstream text;
    for (const nlohmann::json& ex : examples) {
      const Grid goal = Grid::from_string(ex.at("goal").get<std::string>());
      Program initial, final_program;
      ex.at("initial_program").get_to(initial);
      ex.at("final_program").get_to(final_program);
      text << "scene " << ex.at("scene").get<int>() << "\n";
      text << ascii_grid(goal);
      text << "initial (" << initial.length() << " actions):";
      for (const PlacedAction& s : initial.steps) {
        text << " " << lexicon.at(static_cast<std::size_t>(s.action)).name << "@(" << s.anchor.col
             << "," << s.anchor.row << ")";
      }
      text << "\nfinal (" << final_program.length() << " actions):";
      for (const PlacedAction& s : final_program.steps) {
        text << " " << lexicon.at(static_cast<std::size_t>(s.action)).name << "@(" << s.anchor.col
             << "," << s.anchor.row << ")";
      }
      text << "\n\n";
      write_file(out_dir / ("scene_" + std::to_string(ex.at("scene").get<int>()) + ".svg"),
                 svg_program_render(ex, lexicon));
    }
    write_file(out_dir / "scenes.txt", text.str());
  }
}

}  // namespace pace
