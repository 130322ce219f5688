"""Deployment-style reporting from per-location episode counts.

Three one-hour deployments (a school crosswalk, a mall intersection, a
park path) are summarized into location tables, then pooled into the
headline numbers: overall accuracy, pedestrians helped per hour, false
activations per hour, and the projected false alarms per day.

Run:  python3 demos/deployment_metrics.py
"""
from xwalk import LocationReport, aggregate, display_accuracy, display_rate, round_half_up
from xwalk.evaluate import format_location_table

reports = [
    LocationReport.from_counts(20, 23, 83, 91, false_alarm_events=0,
                               predictions_made=3600, label="Location 1 (school)"),
    LocationReport.from_counts(69, 86, 125, 143, false_alarm_events=1,
                               predictions_made=3600, label="Location 2 (mall)"),
    LocationReport.from_counts(50, 66, 37, 43, false_alarm_events=3,
                               predictions_made=3600, label="Location 3 (park)"),
]

for report in reports:
    print(format_location_table(report))
    print()

agg = aggregate(reports, hours_per_report=1.0)
print("pooled across all three hours:")
print(f"  overall accuracy        {display_accuracy(agg.overall_accuracy)}")
print(f"  crossing accuracy       {display_accuracy(agg.crossing_accuracy)}")
print(f"  passing accuracy        {display_accuracy(agg.passing_accuracy)}")
print(f"  helped per hour         {round_half_up(agg.helped_per_hour, 2)}")
print(f"  false activations/hour  {agg.false_activations_per_hour:g}")
print(f"  mean false-alarm rate   {display_rate(agg.mean_false_alarm_rate)}")
print(f"  projected false alarms  {agg.projected_false_alarms_per_day}/day")

# The pooled overall accuracy is a ratio of summed counts, not the mean
# of the three location accuracies; the two differ here.
mean_of_accs = sum(r.combined_accuracy for r in reports) / len(reports)
print(f"\n(pooled {agg.overall_accuracy:.6f} vs naive mean {mean_of_accs:.6f})")
