import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns


def plot_overlap_distribution(report, path='overlap_distribution.png', bins=20):
    """
    Visualize how overlap ratios are distributed over library pairs.

    Parameters:
    -----------
    report : OverlapReport
        Pairwise overlap report
    path : str, optional
        Where to save the figure
    bins : int, optional
        Number of histogram bins over [0, 1]
    """
    ratios = [float(r) for r in report.ratios()]

    plt.style.use('seaborn-v0_8-darkgrid')
    plt.figure(figsize=(10, 6))
    sns.histplot(ratios, bins=np.linspace(0, 1, bins + 1), color='steelblue')
    plt.title('Overlap Ratio Between Library Pairs')
    plt.xlabel('Overlap ratio')
    plt.ylabel('Library pairs')
    plt.grid(True, alpha=0.3)

    plt.tight_layout()
    plt.savefig(path, dpi=300)
    plt.close()
    return path


def plot_overlap_matrix(matrix, path='overlap_matrix.png'):
    """
    Heatmap of overlap(a_y, b_x) over the release pairs of two libraries.

    Parameters:
    -----------
    matrix : pandas.DataFrame
        Output of analytics.overlap_matrix
    path : str, optional
        Where to save the figure
    """
    values = matrix.astype(float)

    plt.figure(figsize=(max(6, 0.5 * len(values.columns) + 3), max(4, 0.4 * len(values.index) + 2)))
    sns.heatmap(values, vmin=0, vmax=1, cmap='Blues', annot=values.size <= 100, fmt='.2f',
                cbar_kws={'label': 'overlap'})
    plt.title(f'Overlap of {values.index.name} releases with {values.columns.name} releases')
    plt.xlabel(f'{values.columns.name} release')
    plt.ylabel(f'{values.index.name} release')

    plt.tight_layout()
    plt.savefig(path, dpi=300)
    plt.close()
    return path


def plot_uniqueness(class_report, code_report=None, path='profile_uniqueness.png'):
    """
    Bar chart of how many releases share a profile signature.

    Parameters:
    -----------
    class_report : UniquenessReport
        Class-level grouping
    code_report : UniquenessReport, optional
        Code-level grouping drawn next to the class-level one
    path : str, optional
        Where to save the figure
    """
    frames = []
    for report in filter(None, [class_report, code_report]):
        frame = report.to_frame()
        frame['profiles'] = frame['group_size'] * frame['groups']
        frame['level'] = report.level.value
        frames.append(frame)
    data = pd.concat(frames, ignore_index=True)

    plt.style.use('seaborn-v0_8-darkgrid')
    plt.figure(figsize=(10, 6))
    sns.barplot(x='group_size', y='profiles', hue='level', data=data)
    plt.title('Profiles by Signature Group Size')
    plt.xlabel('Releases sharing one signature')
    plt.ylabel('Profiles')
    plt.grid(True, alpha=0.3)

    plt.tight_layout()
    plt.savefig(path, dpi=300)
    plt.close()
    return path
