# -*- coding: utf-8 -*-
# Filename: run_data_plot.py

"""
Figures of training histories and spike timing histograms.
Created on 2026-09-12
"""

import numpy as np
import matplotlib.pyplot as plt

def plot(data, x_column, columns=None, mpl_opt=''):
    '''
    Plot columns of a RunData against one of its columns, one figure per column.
    Args:
        data: RunData.
        x_column: name of the x axis column.
        columns: names of the plotted columns, all other numeric columns if None.
        mpl_opt: strings to specify matplotlib properties.
    Returns:
        list of figures.
    '''
    if columns is None:
        columns = [c for c in data.legend if c != x_column]
    x = data.column(x_column).astype(np.float64)
    figs = []
    for c in columns:
        i = data.legend.index(c)
        unit = data.units[i]
        figs.append(plot_in_one_figure(x, data.column(c).astype(np.float64),
                                       logy=data.logy,
                                       title=data.name + '_' + c,
                                       xlabel=x_column,
                                       ylabel=c + (' (' + unit + ')' if unit else ''),
                                       grid=data.grid, mpl_opt=mpl_opt))
    return figs

def plot_history(history, columns=('loss_total', 'train_acc', 'test_acc', 'latency')):
    '''
    Training curves versus epoch.
    '''
    return plot(history, 'epoch', [c for c in columns if c in history.legend])

def plot_histograms(hist):
    '''
    One bar chart per (layer, branch) of a timing histogram table.
    Args:
        hist: RunData with columns layer, branch, bin_left, bin_right, count, sentinel_count.
    Returns:
        list of figures.
    '''
    layers = hist.column('layer')
    branches = hist.column('branch')
    left = hist.column('bin_left').astype(np.float64)
    right = hist.column('bin_right').astype(np.float64)
    count = hist.column('count').astype(np.float64)
    figs = []
    seen = []
    for key in zip(layers, branches):
        if key not in seen:
            seen.append(key)
    for layer, branch in seen:
        sel = (layers == layer) & (branches == branch)
        fig = plt.figure('%s_%s' % (layer, branch))
        axis = fig.add_subplot(111)
        axis.bar(left[sel], count[sel], width=right[sel] - left[sel], align='edge')
        axis.set_xlabel('spike time')
        axis.set_ylabel('count')
        axis.set_title('%s (%s)' % (layer, branch))
        axis.grid(True)
        figs.append(fig)
    return figs

def plot_in_one_figure(x, y, logy=False, title='Figure', xlabel=None, ylabel=None,
                       grid='on', mpl_opt=''):
    '''
    Create a figure and plot x/y in this figure.
    '''
    fig = plt.figure(title)
    axis = fig.add_subplot(111)
    if logy:
        axis.semilogy(x, y, mpl_opt)
    else:
        axis.plot(x, y, mpl_opt)
    if xlabel is not None:
        axis.set_xlabel(xlabel)
    if ylabel is not None:
        axis.set_ylabel(ylabel)
    if grid.lower() != 'off':
        axis.grid(True)
    return fig

def show_plot():
    '''
    Show all plots
    '''
    plt.show()
