#pragma once

// Minimal standalone SVG 1.1 line-chart writer used for the study figures.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace somid {

class SvgChart {
  public:
    SvgChart(std::string title, std::string x_label, std::string y_label, double x_min,
             double x_max, double y_min, double y_max)
        : title_(std::move(title)),
          x_label_(std::move(x_label)),
          y_label_(std::move(y_label)),
          x_min_(x_min),
          x_max_(x_max),
          y_min_(y_min),
          y_max_(y_max) {}

    struct Point {
        double x = 0, y = 0;
    };

    void add_curve(const std::string& name, const std::string& color,
                   const std::vector<Point>& line, const std::vector<Point>& up_markers,
                   const std::vector<Point>& down_markers) {
        curves_.push_back({name, color, line, up_markers, down_markers});
    }

    bool in_range(double x, double y) const {
        return x >= x_min_ && x <= x_max_ && y >= y_min_ && y <= y_max_;
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write chart file '" + path + "'");
        out << render();
    }

    std::string render() const {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width_
           << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_
           << "\">\n";
        os << "<rect width=\"" << width_ << "\" height=\"" << height_
           << "\" fill=\"white\"/>\n";
        os << "<text x=\"" << width_ / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

        // Axes box.
        os << "<rect x=\"" << left_ << "\" y=\"" << top_ << "\" width=\"" << plot_w()
           << "\" height=\"" << plot_h()
           << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

        // Ticks: 5 on each axis.
        for (int i = 0; i <= 4; ++i) {
            const double fx = x_min_ + (x_max_ - x_min_) * i / 4.0;
            const double px = map_x(fx);
            os << "<line x1=\"" << px << "\" y1=\"" << top_ + plot_h() << "\" x2=\"" << px
               << "\" y2=\"" << top_ + plot_h() + 5 << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << px << "\" y=\"" << top_ + plot_h() + 20
               << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
               << format_num(fx) << "</text>\n";
            const double fy = y_min_ + (y_max_ - y_min_) * i / 4.0;
            const double py = map_y(fy);
            os << "<line x1=\"" << left_ - 5 << "\" y1=\"" << py << "\" x2=\"" << left_
               << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << left_ - 8 << "\" y=\"" << py + 4
               << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
               << format_num(fy) << "</text>\n";
        }
        os << "<text x=\"" << left_ + plot_w() / 2 << "\" y=\"" << height_ - 8
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
           << x_label_ << "</text>\n";
        os << "<text x=\"16\" y=\"" << top_ + plot_h() / 2
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           << "transform=\"rotate(-90 16 " << top_ + plot_h() / 2 << ")\">" << y_label_
           << "</text>\n";

        for (const auto& c : curves_) {
            if (!c.line.empty()) {
                os << "<polyline fill=\"none\" stroke=\"" << c.color
                   << "\" stroke-width=\"1.5\" points=\"";
                for (const auto& p : c.line) os << map_x(p.x) << "," << map_y(p.y) << " ";
                os << "\"/>\n";
                for (const auto& p : c.line)
                    os << "<circle cx=\"" << map_x(p.x) << "\" cy=\"" << map_y(p.y)
                       << "\" r=\"2.5\" fill=\"" << c.color << "\"/>\n";
            }
            for (const auto& p : c.up_markers) os << triangle(p, c.color, true);
            for (const auto& p : c.down_markers) os << triangle(p, c.color, false);
        }

        // Legend, top-right inside the plot box.
        double ly = top_ + 14;
        for (const auto& c : curves_) {
            const double lx = left_ + plot_w() - 120;
            os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24
               << "\" y2=\"" << ly - 4 << "\" stroke=\"" << c.color
               << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << lx + 30 << "\" y=\"" << ly
               << "\" font-family=\"sans-serif\" font-size=\"12\">" << c.name << "</text>\n";
            ly += 16;
        }
        os << "</svg>\n";
        return os.str();
    }

  private:
    struct Curve {
        std::string name, color;
        std::vector<Point> line, up_markers, down_markers;
    };

    double plot_w() const { return width_ - left_ - right_; }
    double plot_h() const { return height_ - top_ - bottom_; }
    double map_x(double x) const { return left_ + (x - x_min_) / (x_max_ - x_min_) * plot_w(); }
    double map_y(double y) const {
        return top_ + (y_max_ - y) / (y_max_ - y_min_) * plot_h();
    }

    std::string triangle(const Point& p, const std::string& color, bool up) const {
        const double cx = map_x(p.x), cy = map_y(p.y), r = 4.0;
        std::ostringstream os;
        os << "<polygon fill=\"none\" stroke=\"" << color << "\" points=\"";
        if (up)
            os << cx - r << "," << cy + r << " " << cx + r << "," << cy + r << " " << cx << ","
               << cy - r;
        else
            os << cx - r << "," << cy - r << " " << cx + r << "," << cy - r << " " << cx << ","
               << cy + r;
        os << "\"/>\n";
        return os.str();
    }

    static std::string format_num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return buf;
    }

    std::string title_, x_label_, y_label_;
    double x_min_, x_max_, y_min_, y_max_;
    double width_ = 640, height_ = 420;
    double left_ = 60, right_ = 20, top_ = 40, bottom_ = 50;
    std::vector<Curve> curves_;
};

}  // namespace somid
